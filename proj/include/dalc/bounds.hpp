#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace dalc {

/// c / (1 - e^{-c}), evaluated stably for small c. Throws unless c > 0.
double catoni_factor(double c);

/// Catoni-style PAC-Bayes bound on an expected loss in [0, 1]:
///
///   c/(1 - e^{-c}) * [ mean + (kl_multiplier * KL + ln(1/delta)) / (m c) ]
///
/// kl_multiplier is 1 for a single posterior, 2 for the paired-voter
/// quantities (disagreement, joint error).
double catoni_bound(double empirical_mean, double kl, std::size_t m, double c, double delta,
                    int kl_multiplier = 1);

/// Looser variant with factor 1 / (1 - c/2), valid for c in (0, 2).
double catoni_bound_simple(double empirical_mean, double kl, std::size_t m, double c,
                           double delta, int kl_multiplier = 1);

/// Distribution-level adaptation bound on the target Gibbs risk:
///
///   d_T / 2 + beta_q * e_S^(1 - 1/q) + eta
///
/// q = +inf uses exponent 1.
double da_bound_ideal(double d_T, double e_S, double beta_q, double q, double eta);

struct BoundInputs {
    double d_hat = 0.0;   // empirical target disagreement
    double e_hat = 0.0;   // empirical source joint error
    double kl = 0.0;      // |w|^2 / 2 (or alpha' K alpha / 2)
    std::size_t m_s = 1;
    std::size_t m_t = 1;
    double b = 1.0;
    double c = 1.0;
    double delta = 0.05;
    double beta_inf = 1.0;
    double eta = 0.0;
    std::optional<double> q;          // for the plug-in ideal bound; needs beta_q
    std::optional<double> beta_q;
    std::optional<double> gibbs_hat;  // empirical source Gibbs risk, for the single-risk bound

    void validate() const;
};

struct BoundReport {
    BoundInputs inputs;
    double b_prime = 0.0;  // b / (1 - e^{-b}) * beta_inf
    double c_prime = 0.0;  // c / (1 - e^{-c})
    /// Ideal bound with the empirical estimates plugged in (not a PAC guarantee).
    double ideal_plugin = 0.0;
    /// Catoni bound on the source Gibbs risk, when gibbs_hat is given.
    std::optional<double> source_gibbs_bound;
    double disagreement_bound = 0.0;  // on d_T, confidence 1 - delta
    double joint_error_bound = 0.0;   // on e_S, confidence 1 - delta
    /// c' d/2 + b' e + eta + (c'/(m_t c) + b'/(m_s b)) (2 KL + ln(2/delta)), target Gibbs risk
    double target_gibbs_bound = 0.0;
    /// Twice the above: bound on the risk of the linear classifier sgn(w.x).
    double target_vote_bound = 0.0;
};

BoundReport da_generalization_bound(const BoundInputs& inputs);

/// Evaluates the generalization bound over every (b, c) pair. No union bound
/// is applied across the grid: the minimum holds at confidence 1 - delta only
/// if the pair had been fixed in advance.
struct BoundSweep {
    std::vector<double> b_values;
    std::vector<double> c_values;
    std::vector<double> target_vote_bound;  // row-major, b index major
    std::size_t best_b_index = 0;
    std::size_t best_c_index = 0;
    double best_value = 0.0;

    double at(std::size_t bi, std::size_t ci) const {
        return target_vote_bound[bi * c_values.size() + ci];
    }
};

BoundSweep sweep_bound(const BoundInputs& inputs, const std::vector<double>& b_values,
                       const std::vector<double>& c_values);

}  // namespace dalc
