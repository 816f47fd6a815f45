#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace dalc {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The standard distributions are not
// (their algorithms are implementation-defined), so every derived draw is
// computed here:
//   uniform()      53 high bits of one engine output, scaled to [0, 1)
//   normal()       Box-Muller on two uniforms, no cached second value
//   below(n)       rejection sampling on the top bits
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    std::size_t below(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace dalc
