#pragma once

#include <cstdint>
#include <string_view>

namespace routesim {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = kFnvOffsetBasis;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t rotl64(std::uint64_t v, unsigned n) {
    n &= 63u;
    if (n == 0) return v;
    return (v << n) | (v >> (64u - n));
}

// Deterministic xorshift64* stream, used for frame-drop decisions and test
// input generation. A zero seed would be a fixed point, so it is remapped.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 2685821657736338717ULL;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

    // Uniform in [0, bound). bound == 0 returns 0.
    std::uint64_t next_below(std::uint64_t bound) { return bound ? next() % bound : 0; }

private:
    std::uint64_t state_;
};

}  // namespace routesim
