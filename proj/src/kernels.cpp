#include "dalc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dalc {

void KernelSpec::validate() const {
    if (family == KernelFamily::Rbf && !(gamma > 0.0 && std::isfinite(gamma)))
        throw std::invalid_argument("rbf kernel: gamma must be positive and finite");
}

std::string KernelSpec::name() const {
    return family == KernelFamily::Linear ? "linear" : "rbf";
}

KernelSpec parse_kernel(const std::string& name, double gamma) {
    KernelSpec spec;
    if (name == "linear")
        spec = KernelSpec::linear();
    else if (name == "rbf")
        spec = KernelSpec::rbf(gamma);
    else
        throw std::invalid_argument("unknown kernel '" + name + "' (expected linear or rbf)");
    spec.validate();
    return spec;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    spec.validate();
    if (spec.family == KernelFamily::Linear) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += x[i] * y[i];
        return s;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-spec.gamma * d2);
}

double kernel_eval(const KernelSpec& spec, const SparseVector& x, double x_sq,
                   const SparseVector& y, double y_sq) {
    const double xy = dot(x, y);
    if (spec.family == KernelFamily::Linear)
        return xy;
    // Clamp: rounding can make |x|^2 + |y|^2 - 2 x.y slightly negative when x == y.
    const double d2 = std::max(0.0, x_sq + y_sq - 2.0 * xy);
    return std::exp(-spec.gamma * d2);
}

double kernel_eval(const KernelSpec& spec, const SparseVector& x, const SparseVector& y) {
    spec.validate();
    return kernel_eval(spec, x, x.squared_norm(), y, y.squared_norm());
}

GramMatrix::GramMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
    if (entries_.size() != n_ * n_)
        throw std::invalid_argument("GramMatrix: entry count does not match size");
}

void GramMatrix::multiply(std::span<const double> v, std::span<double> out) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const double* r = entries_.data() + i * n_;
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j)
            s += r[j] * v[j];
        out[i] = s;
    }
}

double GramMatrix::quadratic_form(std::span<const double> v) const {
    std::vector<double> kv(n_);
    multiply(v, kv);
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        s += v[i] * kv[i];
    return s;
}

GramMatrix gram(const KernelSpec& spec, const Dataset& points) {
    spec.validate();
    const std::size_t n = points.size();
    if (n == 0)
        throw std::invalid_argument("gram: empty sample");
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = points.squared_norm(i);
        for (std::size_t j = i; j < n; ++j) {
            const double v =
                kernel_eval(spec, points.point(i), xi, points.point(j), points.squared_norm(j));
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
        if (spec.family == KernelFamily::Rbf)
            k[i * n + i] = 1.0;
    }
    return GramMatrix(n, std::move(k));
}

GramMatrix gram(const KernelSpec& spec, const Dataset& source, const Dataset& target) {
    return gram(spec, concat_features(source, target));
}

}  // namespace dalc
