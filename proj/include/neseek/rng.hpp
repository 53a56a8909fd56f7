#pragma once

#include <cstdint>
#include <random>

#include "neseek/types.hpp"

namespace neseek {

/// Seeded RNG with portable draws. std::mt19937_64 output is pinned by the
/// standard, but the distribution adaptors are not; mapping the raw 64-bit
/// stream ourselves keeps configs byte-reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1): top 53 bits of the generator word.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    Vec uniform_vec(Eigen::Index n, double lo, double hi) {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace neseek
