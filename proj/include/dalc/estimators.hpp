#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "dalc/data.hpp"
#include "dalc/model.hpp"
#include "dalc/rng.hpp"
#include "dalc/synthetic.hpp"

namespace dalc {

// Empirical means over a sample of the posterior quantities of rho_w, through
// the normalized margin m(x) = w.x / |x| (or its kernel analogue):
//
//   disagreement   mean phi_dis(m(x))          label-free
//   joint error    mean phi_err(y m(x))
//   Gibbs risk     mean phi(y m(x))            = disagreement / 2 + joint error
//   vote risk      mean 1[sgn(w.x) != y]
//
// These are means, unlike the DALC objective, which uses sums. All throw
// std::invalid_argument on an empty sample, and the label-based ones on an
// unlabeled sample.

double empirical_disagreement(const DalcModel& model, const Dataset& sample);
double empirical_joint_error(const DalcModel& model, const Dataset& sample);
double empirical_gibbs_risk(const DalcModel& model, const Dataset& sample);
double empirical_vote_risk(const DalcModel& model, const Dataset& sample);
/// |disagreement(source) - disagreement(target)|, a diagnostic only.
double empirical_domain_disagreement(const DalcModel& model, const Dataset& source,
                                     const Dataset& target);

double empirical_disagreement(std::span<const double> w, const Dataset& sample);
double empirical_joint_error(std::span<const double> w, const Dataset& sample);
double empirical_gibbs_risk(std::span<const double> w, const Dataset& sample);
double empirical_vote_risk(std::span<const double> w, const Dataset& sample);
double empirical_domain_disagreement(std::span<const double> w, const Dataset& source,
                                     const Dataset& target);

/// Zero-one error of predictions against labels.
double zero_one_error(std::span<const int> predicted, std::span<const int> labels);

struct EmpiricalEstimates {
    double disagreement = 0.0;
    double joint_error = 0.0;
    double gibbs_risk = 0.0;
    double vote_risk = 0.0;
    std::size_t sample_size = 0;
};

/// All four quantities on one labeled sample.
EmpiricalEstimates estimate(const DalcModel& model, const Dataset& labeled_sample);

struct DivergenceEstimate {
    double q = 1.0;          // +inf for the sup form
    double beta_q = 1.0;
    double eta = 0.0;
    std::size_t mc_samples = 0;
    bool lower_bound = false;  // true for q = +inf: the max over draws under-estimates the sup
};

using DensityRatio = std::function<double(std::span<const double>, int)>;
using LabeledSampler = std::function<LabeledPoint(Rng&)>;

/// Monte-Carlo estimate of [E_S (T/S)^q]^(1/q) from n source draws; q = +inf
/// reports the largest ratio seen. Throws on q <= 0, n = 0, or a negative or
/// non-finite ratio.
DivergenceEstimate beta_q_monte_carlo(const DensityRatio& ratio, const LabeledSampler& sampler,
                                      double q, std::size_t n, std::uint64_t seed,
                                      double eta = 0.0);

/// The term for target mass outside the source support. With no input it is
/// 0; with only the outside mass it is that mass (its worst case); with both,
/// eta must lie in [0, outside_mass].
double resolve_eta(std::optional<double> eta, std::optional<double> outside_mass);

}  // namespace dalc
