#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dalc/data.hpp"
#include "dalc/rng.hpp"

namespace dalc {

/// A labeled source sample, an unlabeled target sample, and the target
/// labels kept aside for evaluation only. Training never sees target_labels.
struct AdaptationTask {
    Dataset source;
    Dataset target;
    std::vector<int> target_labels;
};

struct MoonsConfig {
    std::size_t n_per_domain = 300;
    double noise = 0.1;
    double rotation_degrees = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Two interleaving half circles. Class +1 lies on the upper unit half circle
/// (cos t, sin t), class -1 on (1 - cos t, 0.5 - sin t), t ~ U[0, pi], plus
/// isotropic Gaussian noise of standard deviation `noise`. The target is an
/// independent draw rotated counter-clockwise by rotation_degrees about the
/// target sample's centroid. Each domain gets ceil(n/2) points of class +1
/// and floor(n/2) of class -1, in shuffled order.
AdaptationTask make_moons(const MoonsConfig& config);

/// Bag-of-words style sparse task with a vocabulary shift between domains.
///
/// The vocabulary is split into a small shared polar lexicon, one polar
/// lexicon per domain, and background words. A document of class y draws
/// `words_per_doc` tokens: shared polar words with probability
/// `shared_rate`, its own domain's polar words with `domain_rate`, and
/// background words otherwise. A polar word agrees with y with probability
/// `polarity_purity`. Features are log(1 + count).
struct SparseShiftConfig {
    std::size_t dim = 5000;
    std::size_t n_source = 500;
    std::size_t n_target = 500;
    std::size_t shared_lexicon = 50;    // words per polarity
    std::size_t domain_lexicon = 200;   // words per polarity per domain
    std::size_t words_per_doc = 40;
    double shared_rate = 0.1;
    double domain_rate = 0.3;
    double polarity_purity = 0.8;
    std::uint64_t seed = 0;

    void validate() const;
};

AdaptationTask make_sparse_shift(const SparseShiftConfig& config);

struct LabeledPoint {
    std::vector<double> x;
    int y = 1;
};

/// Source and target distributions over a finite set of atoms. Atom k is the
/// one-dimensional point x = k + 1 with label +1 for even k and -1 for odd k.
class DiscreteShift {
  public:
    DiscreteShift(std::vector<double> source_probs, std::vector<double> target_probs);

    std::size_t atoms() const { return source_.size(); }
    LabeledPoint sample_source(Rng& rng) const;
    double density_ratio(std::span<const double> x, int y) const;
    /// Exact [sum_k S_k (T_k / S_k)^q]^(1/q); q = +inf gives max_k T_k / S_k.
    double beta(double q) const;

  private:
    std::size_t atom_of(std::span<const double> x, int y) const;

    std::vector<double> source_;
    std::vector<double> target_;
    std::vector<double> cumulative_;
};

/// Source N(0, I), target N(shift, I), labels sign(x_0) in both domains.
/// The density ratio exp(shift.x - |shift|^2/2) is unbounded, so beta(+inf)
/// is +inf and any Monte-Carlo max is only a lower bound.
class GaussianShift {
  public:
    explicit GaussianShift(std::vector<double> shift);

    std::size_t dim() const { return shift_.size(); }
    LabeledPoint sample_source(Rng& rng) const;
    double density_ratio(std::span<const double> x, int y) const;
    /// exp((q - 1) |shift|^2 / 2)
    double beta(double q) const;

  private:
    std::vector<double> shift_;
    double shift_sq_ = 0.0;
};

}  // namespace dalc
