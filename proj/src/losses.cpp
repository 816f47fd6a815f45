#include "dalc/losses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dalc {

namespace {

void require_finite(double x, const char* fn) {
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string(fn) + ": margin must be finite, got " +
                                    std::to_string(x));
}

// erfc evaluates the upper tail directly, so phi keeps full relative
// precision for large positive margins instead of cancelling in 1 - cdf.
inline double upper_tail(double x) {
    return 0.5 * std::erfc(x * (1.0 / std::numbers::sqrt2));
}

inline double density(double x) {
    constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace

double phi(double x) {
    require_finite(x, "phi");
    return upper_tail(x);
}

double phi_dis(double x) {
    require_finite(x, "phi_dis");
    return 2.0 * upper_tail(x) * upper_tail(-x);
}

double phi_err(double x) {
    require_finite(x, "phi_err");
    const double p = upper_tail(x);
    return p * p;
}

double d_phi(double x) {
    require_finite(x, "d_phi");
    return -density(x);
}

double d_phi_dis(double x) {
    require_finite(x, "d_phi_dis");
    // 2 phi'(x) (phi(-x) - phi(x)); written with both tails to avoid 1 - 2 phi(x)
    return -2.0 * density(x) * (upper_tail(-x) - upper_tail(x));
}

double d_phi_err(double x) {
    require_finite(x, "d_phi_err");
    return -2.0 * upper_tail(x) * density(x);
}

}  // namespace dalc
