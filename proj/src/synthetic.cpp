#include "dalc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dalc {

void MoonsConfig::validate() const {
    if (n_per_domain < 2)
        throw std::invalid_argument("moons: n_per_domain must be at least 2");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw std::invalid_argument("moons: noise must be a finite nonnegative value");
    if (!std::isfinite(rotation_degrees))
        throw std::invalid_argument("moons: rotation must be finite");
}

namespace {

struct MoonSample {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
};

MoonSample draw_moons(std::size_t n, double noise, Rng& rng) {
    MoonSample s;
    const std::size_t n_pos = (n + 1) / 2;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    s.rows.resize(n);
    s.labels.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t slot = order[k];
        const double t = rng.uniform(0.0, std::numbers::pi);
        double x, y;
        if (k < n_pos) {
            x = std::cos(t);
            y = std::sin(t);
            s.labels[slot] = 1;
        } else {
            x = 1.0 - std::cos(t);
            y = 0.5 - std::sin(t);
            s.labels[slot] = -1;
        }
        x += rng.normal(0.0, noise);
        y += rng.normal(0.0, noise);
        s.rows[slot] = {x, y};
    }
    return s;
}

}  // namespace

AdaptationTask make_moons(const MoonsConfig& config) {
    config.validate();
    Rng rng(config.seed);
    MoonSample src = draw_moons(config.n_per_domain, config.noise, rng);
    MoonSample tgt = draw_moons(config.n_per_domain, config.noise, rng);

    double cx = 0.0, cy = 0.0;
    for (const auto& r : tgt.rows) {
        cx += r[0];
        cy += r[1];
    }
    cx /= static_cast<double>(tgt.rows.size());
    cy /= static_cast<double>(tgt.rows.size());
    const double theta = config.rotation_degrees * std::numbers::pi / 180.0;
    const double c = std::cos(theta), s = std::sin(theta);
    for (auto& r : tgt.rows) {
        const double dx = r[0] - cx, dy = r[1] - cy;
        r[0] = cx + c * dx - s * dy;
        r[1] = cy + s * dx + c * dy;
    }

    AdaptationTask task;
    task.source = Dataset::from_dense(src.rows, std::move(src.labels), Role::Source);
    task.target = Dataset::from_dense(tgt.rows, std::nullopt, Role::Target);
    task.target_labels = std::move(tgt.labels);
    return task;
}

void SparseShiftConfig::validate() const {
    if (n_source == 0 || n_target == 0)
        throw std::invalid_argument("sparse shift: both domains need examples");
    if (words_per_doc == 0)
        throw std::invalid_argument("sparse shift: words_per_doc must be positive");
    if (shared_lexicon == 0 || domain_lexicon == 0)
        throw std::invalid_argument("sparse shift: lexicons must be nonempty");
    if (2 * shared_lexicon + 4 * domain_lexicon >= dim)
        throw std::invalid_argument("sparse shift: dimension too small for the lexicons");
    if (shared_rate < 0.0 || domain_rate < 0.0 || shared_rate + domain_rate > 1.0)
        throw std::invalid_argument("sparse shift: word rates must be nonnegative and sum to <= 1");
    if (polarity_purity < 0.0 || polarity_purity > 1.0)
        throw std::invalid_argument("sparse shift: polarity_purity must lie in [0, 1]");
}

namespace {

struct Vocabulary {
    std::size_t shared, domain, dim;
    // Polarity p is 0 for +1 and 1 for -1; domain d is 0 (source) or 1 (target).
    std::size_t shared_begin(int p) const { return p * shared; }
    std::size_t domain_begin(int d, int p) const { return 2 * shared + (2 * d + p) * domain; }
    std::size_t background_begin() const { return 2 * shared + 4 * domain; }
};

SparseVector draw_document(const Vocabulary& v, const SparseShiftConfig& cfg, int domain, int y,
                           Rng& rng) {
    std::map<std::uint32_t, int> counts;
    const int own = y > 0 ? 0 : 1;
    for (std::size_t w = 0; w < cfg.words_per_doc; ++w) {
        const double u = rng.uniform();
        std::size_t word;
        if (u < cfg.shared_rate + cfg.domain_rate) {
            const int polarity = rng.uniform() < cfg.polarity_purity ? own : 1 - own;
            if (u < cfg.shared_rate)
                word = v.shared_begin(polarity) + rng.below(v.shared);
            else
                word = v.domain_begin(domain, polarity) + rng.below(v.domain);
        } else {
            word = v.background_begin() + rng.below(v.dim - v.background_begin());
        }
        ++counts[static_cast<std::uint32_t>(word)];
    }
    SparseVector doc;
    for (const auto& [idx, n] : counts) {
        doc.indices.push_back(idx);
        doc.values.push_back(std::log1p(static_cast<double>(n)));
    }
    return doc;
}

}  // namespace

AdaptationTask make_sparse_shift(const SparseShiftConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const Vocabulary vocab{config.shared_lexicon, config.domain_lexicon, config.dim};

    auto draw = [&](std::size_t n, int domain) {
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i)
            labels[i] = i < (n + 1) / 2 ? 1 : -1;
        rng.shuffle(labels);
        std::vector<SparseVector> docs;
        docs.reserve(n);
        for (int y : labels)
            docs.push_back(draw_document(vocab, config, domain, y, rng));
        return std::pair{std::move(docs), std::move(labels)};
    };

    auto [src_docs, src_labels] = draw(config.n_source, 0);
    auto [tgt_docs, tgt_labels] = draw(config.n_target, 1);

    AdaptationTask task;
    task.source = Dataset(std::move(src_docs), config.dim, std::move(src_labels), Role::Source);
    task.target = Dataset(std::move(tgt_docs), config.dim, std::nullopt, Role::Target);
    task.target_labels = std::move(tgt_labels);
    return task;
}

DiscreteShift::DiscreteShift(std::vector<double> source_probs, std::vector<double> target_probs)
    : source_(std::move(source_probs)), target_(std::move(target_probs)) {
    if (source_.empty() || source_.size() != target_.size())
        throw std::invalid_argument("DiscreteShift: need equally sized nonempty distributions");
    auto check = [](const std::vector<double>& p, const char* which) {
        double total = 0.0;
        for (double v : p) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument(std::string("DiscreteShift: negative ") + which +
                                            " probability");
            total += v;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument(std::string("DiscreteShift: ") + which +
                                        " probabilities must sum to 1");
    };
    check(source_, "source");
    check(target_, "target");
    cumulative_.resize(source_.size());
    std::partial_sum(source_.begin(), source_.end(), cumulative_.begin());
}

LabeledPoint DiscreteShift::sample_source(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    k = std::min(k, source_.size() - 1);
    while (source_[k] == 0.0 && k > 0)
        --k;
    return {{static_cast<double>(k + 1)}, k % 2 == 0 ? 1 : -1};
}

std::size_t DiscreteShift::atom_of(std::span<const double> x, int y) const {
    if (x.size() != 1)
        throw std::invalid_argument("DiscreteShift: points are one-dimensional");
    const double k = x[0] - 1.0;
    if (k < 0.0 || k >= static_cast<double>(source_.size()) || k != std::floor(k))
        throw std::invalid_argument("DiscreteShift: point is not an atom");
    const auto idx = static_cast<std::size_t>(k);
    if ((idx % 2 == 0 ? 1 : -1) != y)
        throw std::invalid_argument("DiscreteShift: label does not match the atom");
    return idx;
}

double DiscreteShift::density_ratio(std::span<const double> x, int y) const {
    const std::size_t k = atom_of(x, y);
    if (source_[k] == 0.0)
        throw std::invalid_argument("DiscreteShift: atom outside the source support");
    return target_[k] / source_[k];
}

double DiscreteShift::beta(double q) const {
    if (!(q > 0.0))
        throw std::invalid_argument("DiscreteShift::beta: q must be positive");
    if (std::isinf(q)) {
        double best = 0.0;
        for (std::size_t k = 0; k < source_.size(); ++k)
            if (source_[k] > 0.0)
                best = std::max(best, target_[k] / source_[k]);
        return best;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < source_.size(); ++k)
        if (source_[k] > 0.0)
            s += source_[k] * std::pow(target_[k] / source_[k], q);
    return std::pow(s, 1.0 / q);
}

GaussianShift::GaussianShift(std::vector<double> shift) : shift_(std::move(shift)) {
    if (shift_.empty())
        throw std::invalid_argument("GaussianShift: shift must have at least one dimension");
    for (double v : shift_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("GaussianShift: shift must be finite");
        shift_sq_ += v * v;
    }
}

LabeledPoint GaussianShift::sample_source(Rng& rng) const {
    LabeledPoint p;
    p.x.resize(shift_.size());
    for (double& v : p.x)
        v = rng.normal();
    p.y = p.x[0] >= 0.0 ? 1 : -1;
    return p;
}

double GaussianShift::density_ratio(std::span<const double> x, int) const {
    if (x.size() != shift_.size())
        throw std::invalid_argument("GaussianShift: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        d += shift_[i] * x[i];
    return std::exp(d - 0.5 * shift_sq_);
}

double GaussianShift::beta(double q) const {
    if (!(q > 0.0))
        throw std::invalid_argument("GaussianShift::beta: q must be positive");
    if (std::isinf(q))
        return shift_sq_ > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    return std::exp(0.5 * (q - 1.0) * shift_sq_);
}

}  // namespace dalc
