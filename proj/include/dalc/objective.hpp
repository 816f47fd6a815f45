#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dalc/data.hpp"
#include "dalc/kernels.hpp"

namespace dalc {

/// Weights of the two loss sums. B scales the source joint-error term and C
/// the target disagreement term. C = 0 is accepted and yields the
/// source-only baseline.
struct DalcHyperparams {
    double B = 1.0;
    double C = 1.0;

    void validate() const;
    bool operator==(const DalcHyperparams&) const = default;
};

// The DALC objective over a weight vector w:
//
//   C sum_target phi_dis(w.x'/|x'|) + B sum_source phi_err(y w.x/|x|) + |w|^2
//
// Sums, not means: B and C absorb the sample sizes.
class PrimalObjective {
  public:
    PrimalObjective(const Dataset& source, const Dataset& target, DalcHyperparams hp);

    std::size_t dim() const { return dim_; }
    double value(std::span<const double> w) const;
    std::vector<double> gradient(std::span<const double> w) const;
    double value_and_gradient(std::span<const double> w, std::span<double> grad) const;

  private:
    void check(std::span<const double> w) const;

    const Dataset& source_;
    const Dataset& target_;
    DalcHyperparams hp_;
    std::size_t dim_;
};

// The same objective for w = sum_i alpha_i phi(x_i) over the m_s + m_t
// training points, written with the Gram matrix K:
//
//   C sum_{i > m_s} phi_dis((K alpha)_i / sqrt(K_ii))
//     + B sum_{i <= m_s} phi_err(y_i (K alpha)_i / sqrt(K_ii)) + alpha' K alpha
class DualObjective {
  public:
    DualObjective(const GramMatrix& K, std::span<const int> source_labels, std::size_t m_s,
                  std::size_t m_t, DalcHyperparams hp);

    std::size_t dim() const { return K_.size(); }
    double value(std::span<const double> alpha) const;
    std::vector<double> gradient(std::span<const double> alpha) const;
    double value_and_gradient(std::span<const double> alpha, std::span<double> grad) const;

  private:
    void check(std::span<const double> alpha) const;

    const GramMatrix& K_;
    std::vector<int> labels_;
    std::size_t m_s_, m_t_;
    DalcHyperparams hp_;
    std::vector<double> inv_sqrt_diag_;
};

double primal_objective(std::span<const double> w, const Dataset& source, const Dataset& target,
                        const DalcHyperparams& hp);
std::vector<double> primal_gradient(std::span<const double> w, const Dataset& source,
                                    const Dataset& target, const DalcHyperparams& hp);
double dual_objective(std::span<const double> alpha, const GramMatrix& K,
                      std::span<const int> source_labels, std::size_t m_s, std::size_t m_t,
                      const DalcHyperparams& hp);
std::vector<double> dual_gradient(std::span<const double> alpha, const GramMatrix& K,
                                  std::span<const int> source_labels, std::size_t m_s,
                                  std::size_t m_t, const DalcHyperparams& hp);

}  // namespace dalc
