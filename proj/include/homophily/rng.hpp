#pragma once

#include <cstdint>
#include <random>

#include "homophily/significance.hpp"

namespace homophily {

/// Seeded random source with fully specified draw algorithms.
///
/// std::mt19937_64 is pinned by the standard, but the std distributions are
/// not; every transform here is spelled out so a given seed yields the same
/// stream on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Rejection sampling, unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via inverse-CDF transform of a uniform draw.
    double normal() { return normal_quantile(uniform()); }

    double lognormal(double log_mean, double log_sigma) {
        return std::exp(log_mean + log_sigma * normal());
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace homophily
