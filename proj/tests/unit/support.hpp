#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dalc/data.hpp"
#include "dalc/rng.hpp"

namespace dalc::test {

inline Dataset random_dense(Rng& rng, std::size_t n, std::size_t d, bool labeled, Role role,
                            double shift = 0.0) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : rows[i])
            v = rng.normal() + shift;
        labels[i] = rng.uniform() < 0.5 ? 1 : -1;
    }
    if (labeled)
        return Dataset::from_dense(rows, labels, role);
    return Dataset::from_dense(rows, std::nullopt, role);
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v)
        x = scale * rng.normal();
    return v;
}

/// Central differences with step h.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> x, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double relative_error(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("dalc_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace dalc::test
