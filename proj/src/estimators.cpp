#include "dalc/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dalc/losses.hpp"

namespace dalc {

namespace {

void require_nonempty(const Dataset& s, const char* fn) {
    if (s.empty())
        throw std::invalid_argument(std::string(fn) + ": empty sample");
}

void require_labeled(const Dataset& s, const char* fn) {
    require_nonempty(s, fn);
    if (!s.labeled())
        throw std::invalid_argument(std::string(fn) + ": sample must be labeled");
}

template <typename Margin, typename Loss>
double mean_loss(const Dataset& s, Margin margin, Loss loss, bool signed_by_label) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double m = margin(i);
        total += loss(signed_by_label ? s.label(i) * m : m);
    }
    return total / static_cast<double>(s.size());
}

auto model_margin(const DalcModel& model, const Dataset& s) {
    return [&model, &s](std::size_t i) { return model.normalized_margin(s.point(i)); };
}

auto primal_margin(std::span<const double> w, const Dataset& s) {
    return [w, &s](std::size_t i) { return dot(w, s.point(i)) / s.norm(i); };
}

void check_primal_dim(std::span<const double> w, const Dataset& s) {
    if (s.dim() > w.size())
        throw std::invalid_argument("estimator: sample dimension " + std::to_string(s.dim()) +
                                    " exceeds weight dimension " + std::to_string(w.size()));
}

}  // namespace

double empirical_disagreement(const DalcModel& model, const Dataset& sample) {
    require_nonempty(sample, "empirical_disagreement");
    return mean_loss(sample, model_margin(model, sample), phi_dis, false);
}

double empirical_joint_error(const DalcModel& model, const Dataset& sample) {
    require_labeled(sample, "empirical_joint_error");
    return mean_loss(sample, model_margin(model, sample), phi_err, true);
}

double empirical_gibbs_risk(const DalcModel& model, const Dataset& sample) {
    require_labeled(sample, "empirical_gibbs_risk");
    return mean_loss(sample, model_margin(model, sample), phi, true);
}

double empirical_vote_risk(const DalcModel& model, const Dataset& sample) {
    require_labeled(sample, "empirical_vote_risk");
    return zero_one_error(model.predict(sample), sample.labels());
}

double empirical_domain_disagreement(const DalcModel& model, const Dataset& source,
                                     const Dataset& target) {
    return std::abs(empirical_disagreement(model, source) - empirical_disagreement(model, target));
}

double empirical_disagreement(std::span<const double> w, const Dataset& sample) {
    require_nonempty(sample, "empirical_disagreement");
    check_primal_dim(w, sample);
    return mean_loss(sample, primal_margin(w, sample), phi_dis, false);
}

double empirical_joint_error(std::span<const double> w, const Dataset& sample) {
    require_labeled(sample, "empirical_joint_error");
    check_primal_dim(w, sample);
    return mean_loss(sample, primal_margin(w, sample), phi_err, true);
}

double empirical_gibbs_risk(std::span<const double> w, const Dataset& sample) {
    require_labeled(sample, "empirical_gibbs_risk");
    check_primal_dim(w, sample);
    return mean_loss(sample, primal_margin(w, sample), phi, true);
}

double empirical_vote_risk(std::span<const double> w, const Dataset& sample) {
    require_labeled(sample, "empirical_vote_risk");
    check_primal_dim(w, sample);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < sample.size(); ++i)
        if (sign_label(dot(w, sample.point(i))) != sample.label(i))
            ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

double empirical_domain_disagreement(std::span<const double> w, const Dataset& source,
                                     const Dataset& target) {
    return std::abs(empirical_disagreement(w, source) - empirical_disagreement(w, target));
}

double zero_one_error(std::span<const int> predicted, std::span<const int> labels) {
    if (predicted.size() != labels.size())
        throw std::invalid_argument("zero_one_error: prediction and label counts differ");
    if (labels.empty())
        throw std::invalid_argument("zero_one_error: no labels");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (predicted[i] != labels[i])
            ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

EmpiricalEstimates estimate(const DalcModel& model, const Dataset& labeled_sample) {
    require_labeled(labeled_sample, "estimate");
    EmpiricalEstimates e;
    e.sample_size = labeled_sample.size();
    double dis = 0.0, joint = 0.0, gibbs = 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labeled_sample.size(); ++i) {
        const SparseVector& x = labeled_sample.point(i);
        const int y = labeled_sample.label(i);
        const double m = model.normalized_margin(x);
        dis += phi_dis(m);
        joint += phi_err(y * m);
        gibbs += phi(y * m);
        if (sign_label(m) != y)
            ++wrong;
    }
    const double n = static_cast<double>(labeled_sample.size());
    e.disagreement = dis / n;
    e.joint_error = joint / n;
    e.gibbs_risk = gibbs / n;
    e.vote_risk = static_cast<double>(wrong) / n;
    return e;
}

DivergenceEstimate beta_q_monte_carlo(const DensityRatio& ratio, const LabeledSampler& sampler,
                                      double q, std::size_t n, std::uint64_t seed, double eta) {
    if (!(q > 0.0))
        throw std::invalid_argument("beta_q: q must be positive (or +inf)");
    if (n == 0)
        throw std::invalid_argument("beta_q: need at least one Monte-Carlo draw");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("beta_q: eta must lie in [0, 1]");
    Rng rng(seed);
    const bool sup = std::isinf(q);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const LabeledPoint p = sampler(rng);
        const double r = ratio(p.x, p.y);
        if (!(r >= 0.0) || !std::isfinite(r))
            throw std::invalid_argument("beta_q: density ratio must be finite and nonnegative");
        if (sup)
            acc = std::max(acc, r);
        else
            acc += std::pow(r, q);
    }
    DivergenceEstimate e;
    e.q = q;
    e.eta = eta;
    e.mc_samples = n;
    e.lower_bound = sup;
    e.beta_q = sup ? acc : std::pow(acc / static_cast<double>(n), 1.0 / q);
    return e;
}

double resolve_eta(std::optional<double> eta, std::optional<double> outside_mass) {
    if (outside_mass && !(*outside_mass >= 0.0 && *outside_mass <= 1.0))
        throw std::invalid_argument("eta: outside-support mass must lie in [0, 1]");
    if (eta && !(*eta >= 0.0 && *eta <= 1.0))
        throw std::invalid_argument("eta: must lie in [0, 1]");
    if (!eta)
        return outside_mass.value_or(0.0);
    if (outside_mass && *eta > *outside_mass)
        throw std::invalid_argument("eta: exceeds the target mass outside the source support");
    return *eta;
}

}  // namespace dalc
