#pragma once

#include <cstdint>
#include <random>

#include "sleq/core.hpp"

namespace sleq {

/// Stateless 64-bit finalizer (splitmix64). Bijective on uint64.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-mode replicate seeding: injective in the replicate index for a
/// fixed base seed (odd-multiplier stride composed with a bijection).
inline std::uint64_t seed_for(std::uint64_t base_seed, std::uint64_t replicate) {
    return mix64(base_seed + replicate * 0xD1342543DE82EF95ull);
}

/// Deterministic generator with an explicit Gaussian implementation so that
/// streams are stable across standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform on (0, 1].
    double uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; one spare is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sleq
