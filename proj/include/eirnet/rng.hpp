#pragma once

// Seeded randomness. Trial k of a run with master seed s uses
// trial_seed(s, k), so any single trial can be replayed on its own.

#include <cstdint>
#include <random>

namespace eirnet {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept
{
    return mix64(master ^ mix64(trial + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on [0,1) with 53 random bits; same stream on every platform.
    double uniform() noexcept { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }
    std::uint64_t bits() noexcept { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace eirnet
