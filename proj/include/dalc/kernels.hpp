#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dalc/data.hpp"

namespace dalc {

enum class KernelFamily { Linear, Rbf };

struct KernelSpec {
    KernelFamily family = KernelFamily::Linear;
    double gamma = 1.0;  // Rbf only: k(x, x') = exp(-gamma |x - x'|^2)

    static KernelSpec linear() { return {KernelFamily::Linear, 1.0}; }
    static KernelSpec rbf(double gamma) { return {KernelFamily::Rbf, gamma}; }

    void validate() const;
    std::string name() const;
    bool operator==(const KernelSpec&) const = default;
};

KernelSpec parse_kernel(const std::string& name, double gamma);

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);
double kernel_eval(const KernelSpec& spec, const SparseVector& x, const SparseVector& y);
/// Same as above with precomputed squared norms (used for Rbf).
double kernel_eval(const KernelSpec& spec, const SparseVector& x, double x_sq,
                   const SparseVector& y, double y_sq);

/// Dense symmetric kernel matrix, row-major. Rows are ordered source points
/// first, then target points.
class GramMatrix {
  public:
    GramMatrix() = default;
    GramMatrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const {
        return {entries_.data() + i * n_, n_};
    }
    const std::vector<double>& entries() const { return entries_; }

    /// out = K v
    void multiply(std::span<const double> v, std::span<double> out) const;
    /// v' K v
    double quadratic_form(std::span<const double> v) const;

  private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

GramMatrix gram(const KernelSpec& spec, const Dataset& source, const Dataset& target);
GramMatrix gram(const KernelSpec& spec, const Dataset& points);

}  // namespace dalc
