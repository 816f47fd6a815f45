#include "dalc/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dalc {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok)
        throw std::invalid_argument(msg);
}

void check_catoni(double mean, double kl, std::size_t m, double c, double delta) {
    require(std::isfinite(mean) && mean >= 0.0, "bound: empirical mean must be nonnegative");
    require(std::isfinite(kl) && kl >= 0.0, "bound: KL must be nonnegative");
    require(m >= 1, "bound: sample size must be at least 1");
    require(c > 0.0 && std::isfinite(c), "bound: c must be positive");
    require(delta > 0.0 && delta <= 1.0, "bound: delta must lie in (0, 1]");
}

}  // namespace

double catoni_factor(double c) {
    require(c > 0.0 && std::isfinite(c), "catoni_factor: c must be positive");
    return c / -std::expm1(-c);
}

double catoni_bound(double empirical_mean, double kl, std::size_t m, double c, double delta,
                    int kl_multiplier) {
    check_catoni(empirical_mean, kl, m, c, delta);
    require(kl_multiplier >= 1, "catoni_bound: kl_multiplier must be positive");
    const double complexity =
        (kl_multiplier * kl + std::log(1.0 / delta)) / (static_cast<double>(m) * c);
    return catoni_factor(c) * (empirical_mean + complexity);
}

double catoni_bound_simple(double empirical_mean, double kl, std::size_t m, double c,
                           double delta, int kl_multiplier) {
    check_catoni(empirical_mean, kl, m, c, delta);
    require(c < 2.0, "catoni_bound_simple: c must lie in (0, 2)");
    require(kl_multiplier >= 1, "catoni_bound_simple: kl_multiplier must be positive");
    const double complexity =
        (kl_multiplier * kl + std::log(1.0 / delta)) / (static_cast<double>(m) * c);
    return (empirical_mean + complexity) / (1.0 - 0.5 * c);
}

double da_bound_ideal(double d_T, double e_S, double beta_q, double q, double eta) {
    require(d_T >= 0.0 && d_T <= 1.0, "da_bound_ideal: d_T must lie in [0, 1]");
    require(e_S >= 0.0 && e_S <= 1.0, "da_bound_ideal: e_S must lie in [0, 1]");
    require(beta_q >= 0.0 && !std::isnan(beta_q), "da_bound_ideal: beta_q must be nonnegative");
    require(q > 0.0, "da_bound_ideal: q must be positive");
    require(eta >= 0.0 && eta <= 1.0, "da_bound_ideal: eta must lie in [0, 1]");
    const double exponent = std::isinf(q) ? 1.0 : 1.0 - 1.0 / q;
    return 0.5 * d_T + beta_q * std::pow(e_S, exponent) + eta;
}

void BoundInputs::validate() const {
    require(d_hat >= 0.0 && d_hat <= 1.0, "bounds: d_hat must lie in [0, 1]");
    require(e_hat >= 0.0 && e_hat <= 1.0, "bounds: e_hat must lie in [0, 1]");
    require(kl >= 0.0 && std::isfinite(kl), "bounds: KL must be nonnegative");
    require(m_s >= 1 && m_t >= 1, "bounds: sample sizes must be at least 1");
    require(b > 0.0 && std::isfinite(b), "bounds: b must be positive");
    require(c > 0.0 && std::isfinite(c), "bounds: c must be positive");
    require(delta > 0.0 && delta <= 1.0, "bounds: delta must lie in (0, 1]");
    require(beta_inf >= 0.0 && std::isfinite(beta_inf), "bounds: beta_inf must be nonnegative");
    require(eta >= 0.0 && eta <= 1.0, "bounds: eta must lie in [0, 1]");
    require(q.has_value() == beta_q.has_value(), "bounds: q and beta_q go together");
    if (q)
        require(*q > 0.0, "bounds: q must be positive");
    if (gibbs_hat)
        require(*gibbs_hat >= 0.0 && *gibbs_hat <= 1.0, "bounds: gibbs_hat must lie in [0, 1]");
}

BoundReport da_generalization_bound(const BoundInputs& in) {
    in.validate();
    BoundReport r;
    r.inputs = in;
    r.c_prime = catoni_factor(in.c);
    r.b_prime = catoni_factor(in.b) * in.beta_inf;

    r.ideal_plugin = in.q ? da_bound_ideal(in.d_hat, in.e_hat, *in.beta_q, *in.q, in.eta)
                          : da_bound_ideal(in.d_hat, in.e_hat, in.beta_inf,
                                           std::numeric_limits<double>::infinity(), in.eta);
    if (in.gibbs_hat)
        r.source_gibbs_bound = catoni_bound(*in.gibbs_hat, in.kl, in.m_s, in.c, in.delta, 1);
    r.disagreement_bound = catoni_bound(in.d_hat, in.kl, in.m_t, in.c, in.delta, 2);
    r.joint_error_bound = catoni_bound(in.e_hat, in.kl, in.m_s, in.b, in.delta, 2);

    const double mt = static_cast<double>(in.m_t), ms = static_cast<double>(in.m_s);
    const double complexity = (r.c_prime / (mt * in.c) + r.b_prime / (ms * in.b)) *
                              (2.0 * in.kl + std::log(2.0 / in.delta));
    r.target_gibbs_bound = r.c_prime * 0.5 * in.d_hat + r.b_prime * in.e_hat + in.eta + complexity;
    r.target_vote_bound = 2.0 * r.target_gibbs_bound;
    return r;
}

BoundSweep sweep_bound(const BoundInputs& inputs, const std::vector<double>& b_values,
                       const std::vector<double>& c_values) {
    require(!b_values.empty() && !c_values.empty(), "sweep_bound: grids must be nonempty");
    BoundSweep s;
    s.b_values = b_values;
    s.c_values = c_values;
    s.target_vote_bound.reserve(b_values.size() * c_values.size());
    s.best_value = std::numeric_limits<double>::infinity();
    for (std::size_t bi = 0; bi < b_values.size(); ++bi) {
        for (std::size_t ci = 0; ci < c_values.size(); ++ci) {
            BoundInputs cell = inputs;
            cell.b = b_values[bi];
            cell.c = c_values[ci];
            const double v = da_generalization_bound(cell).target_vote_bound;
            s.target_vote_bound.push_back(v);
            if (v < s.best_value) {
                s.best_value = v;
                s.best_b_index = bi;
                s.best_c_index = ci;
            }
        }
    }
    return s;
}

}  // namespace dalc
