#pragma once

#include <cstdint>

namespace specdec {

/// Deterministic PRNG (splitmix64). The same seed yields the same stream on
/// every platform, which keeps sweeps and tests bit-reproducible. All
/// randomness in the library flows through an explicitly passed Rng.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        return next_u64() % n;
    }

private:
    std::uint64_t state_;
};

} // namespace specdec
