#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pinnosc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic RNG. Uniform doubles are produced from raw mt19937_64 bits
/// (not std::uniform_real_distribution, whose output is implementation-defined),
/// so streams are bit-identical for a given seed on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Sub-stream for a named purpose, independent of draws taken elsewhere.
    static Rng derive(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0) {
        return Rng(splitmix64(seed ^ fnv1a64(purpose)) + index);
    }

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace pinnosc
