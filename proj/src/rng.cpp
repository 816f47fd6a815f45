#include "dalc/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dalc {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 == 0.0)
        u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("Rng::below: n must be positive");
    if (n == 1)
        return 0;
    const unsigned bits = std::bit_width(static_cast<std::uint64_t>(n - 1));
    for (;;) {
        const std::uint64_t r = engine_() >> (64 - bits);
        if (r < n)
            return static_cast<std::size_t>(r);
    }
}

}  // namespace dalc
