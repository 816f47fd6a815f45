#include "dalc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dalc/losses.hpp"

namespace dalc {

void DalcHyperparams::validate() const {
    if (!(B > 0.0) || !std::isfinite(B))
        throw std::invalid_argument("hyperparameter B must be positive and finite");
    if (!(C >= 0.0) || !std::isfinite(C))
        throw std::invalid_argument("hyperparameter C must be nonnegative and finite");
}

PrimalObjective::PrimalObjective(const Dataset& source, const Dataset& target,
                                 DalcHyperparams hp)
    : source_(source), target_(target), hp_(hp), dim_(std::max(source.dim(), target.dim())) {
    hp_.validate();
    if (!source.empty() && !source.labeled())
        throw std::invalid_argument("primal objective: source sample must be labeled");
}

void PrimalObjective::check(std::span<const double> w) const {
    if (w.size() != dim_)
        throw std::invalid_argument("primal objective: weight vector has dimension " +
                                    std::to_string(w.size()) + ", samples have " +
                                    std::to_string(dim_));
}

double PrimalObjective::value(std::span<const double> w) const {
    check(w);
    double target_sum = 0.0;
    for (std::size_t i = 0; i < target_.size(); ++i)
        target_sum += phi_dis(dot(w, target_.point(i)) / target_.norm(i));
    double source_sum = 0.0;
    for (std::size_t i = 0; i < source_.size(); ++i)
        source_sum += phi_err(source_.label(i) * dot(w, source_.point(i)) / source_.norm(i));
    double reg = 0.0;
    for (double v : w)
        reg += v * v;
    return hp_.C * target_sum + hp_.B * source_sum + reg;
}

double PrimalObjective::value_and_gradient(std::span<const double> w,
                                           std::span<double> grad) const {
    check(w);
    if (grad.size() != w.size())
        throw std::invalid_argument("primal objective: gradient buffer has the wrong size");
    double reg = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        reg += w[j] * w[j];
        grad[j] = 2.0 * w[j];
    }
    double target_sum = 0.0;
    for (std::size_t i = 0; i < target_.size(); ++i) {
        const double inv = 1.0 / target_.norm(i);
        const double m = dot(w, target_.point(i)) * inv;
        target_sum += phi_dis(m);
        axpy(hp_.C * d_phi_dis(m) * inv, target_.point(i), grad);
    }
    double source_sum = 0.0;
    for (std::size_t i = 0; i < source_.size(); ++i) {
        const double inv = 1.0 / source_.norm(i);
        const int y = source_.label(i);
        const double m = y * dot(w, source_.point(i)) * inv;
        source_sum += phi_err(m);
        axpy(hp_.B * y * d_phi_err(m) * inv, source_.point(i), grad);
    }
    return hp_.C * target_sum + hp_.B * source_sum + reg;
}

std::vector<double> PrimalObjective::gradient(std::span<const double> w) const {
    std::vector<double> g(w.size());
    value_and_gradient(w, g);
    return g;
}

DualObjective::DualObjective(const GramMatrix& K, std::span<const int> source_labels,
                             std::size_t m_s, std::size_t m_t, DalcHyperparams hp)
    : K_(K), labels_(source_labels.begin(), source_labels.end()), m_s_(m_s), m_t_(m_t), hp_(hp) {
    hp_.validate();
    if (m_s + m_t != K.size())
        throw std::invalid_argument("dual objective: m_s + m_t must equal the Gram size");
    if (labels_.size() != m_s)
        throw std::invalid_argument("dual objective: need one label per source point");
    for (int y : labels_)
        if (y != 1 && y != -1)
            throw std::invalid_argument("dual objective: labels must be +1 or -1");
    inv_sqrt_diag_.resize(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (!(K(i, i) > 0.0))
            throw std::invalid_argument("dual objective: K(" + std::to_string(i) + "," +
                                        std::to_string(i) +
                                        ") <= 0, degenerate support point");
        inv_sqrt_diag_[i] = 1.0 / std::sqrt(K(i, i));
    }
}

void DualObjective::check(std::span<const double> alpha) const {
    if (alpha.size() != K_.size())
        throw std::invalid_argument("dual objective: alpha has dimension " +
                                    std::to_string(alpha.size()) + ", expected " +
                                    std::to_string(K_.size()));
}

double DualObjective::value(std::span<const double> alpha) const {
    check(alpha);
    const std::size_t n = K_.size();
    std::vector<double> ka(n);
    K_.multiply(alpha, ka);
    double source_sum = 0.0, target_sum = 0.0, reg = 0.0;
    for (std::size_t i = 0; i < m_s_; ++i)
        source_sum += phi_err(labels_[i] * ka[i] * inv_sqrt_diag_[i]);
    for (std::size_t i = m_s_; i < n; ++i)
        target_sum += phi_dis(ka[i] * inv_sqrt_diag_[i]);
    for (std::size_t i = 0; i < n; ++i)
        reg += alpha[i] * ka[i];
    return hp_.C * target_sum + hp_.B * source_sum + reg;
}

double DualObjective::value_and_gradient(std::span<const double> alpha,
                                         std::span<double> grad) const {
    check(alpha);
    if (grad.size() != alpha.size())
        throw std::invalid_argument("dual objective: gradient buffer has the wrong size");
    const std::size_t n = K_.size();
    std::vector<double> ka(n), v(n);
    K_.multiply(alpha, ka);
    double source_sum = 0.0, target_sum = 0.0, reg = 0.0;
    for (std::size_t i = 0; i < m_s_; ++i) {
        const double m = labels_[i] * ka[i] * inv_sqrt_diag_[i];
        source_sum += phi_err(m);
        v[i] = hp_.B * labels_[i] * d_phi_err(m) * inv_sqrt_diag_[i];
    }
    for (std::size_t i = m_s_; i < n; ++i) {
        const double m = ka[i] * inv_sqrt_diag_[i];
        target_sum += phi_dis(m);
        v[i] = hp_.C * d_phi_dis(m) * inv_sqrt_diag_[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        reg += alpha[i] * ka[i];
        v[i] += 2.0 * alpha[i];
    }
    // d/d alpha = K v with v = loss weights + 2 alpha, since K is symmetric.
    K_.multiply(v, grad);
    return hp_.C * target_sum + hp_.B * source_sum + reg;
}

std::vector<double> DualObjective::gradient(std::span<const double> alpha) const {
    std::vector<double> g(alpha.size());
    value_and_gradient(alpha, g);
    return g;
}

double primal_objective(std::span<const double> w, const Dataset& source, const Dataset& target,
                        const DalcHyperparams& hp) {
    return PrimalObjective(source, target, hp).value(w);
}

std::vector<double> primal_gradient(std::span<const double> w, const Dataset& source,
                                    const Dataset& target, const DalcHyperparams& hp) {
    return PrimalObjective(source, target, hp).gradient(w);
}

double dual_objective(std::span<const double> alpha, const GramMatrix& K,
                      std::span<const int> source_labels, std::size_t m_s, std::size_t m_t,
                      const DalcHyperparams& hp) {
    return DualObjective(K, source_labels, m_s, m_t, hp).value(alpha);
}

std::vector<double> dual_gradient(std::span<const double> alpha, const GramMatrix& K,
                                  std::span<const int> source_labels, std::size_t m_s,
                                  std::size_t m_t, const DalcHyperparams& hp) {
    return DualObjective(K, source_labels, m_s, m_t, hp).gradient(alpha);
}

}  // namespace dalc
