#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vlt2 {

/// Deterministic helpers on top of mt19937_64. Distributions are derived
/// from raw draws directly, so streams are identical across standard
/// library implementations for a fixed seed.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double uniform01() {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Box-Muller; one value per call, the pair partner is discarded.
    double gaussian() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

} // namespace vlt2
