#pragma once

// Test-side oracles, written independently of the library code paths they
// check. Expected values in the suites come from here or from hand
// enumeration, never from the implementation under test.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>

namespace oracle {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h = h ^ c;
        h = h * 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t rotl(std::uint64_t v, unsigned n) {
    n %= 64;
    return n == 0 ? v : ((v << n) | (v >> (64 - n)));
}

inline std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

// Brute-force Jaccard over string sets: enumerate the union element by
// element and count membership on both sides.
inline std::pair<std::uint64_t, std::uint64_t> jaccard_counts(const std::set<std::string>& a,
                                                              const std::set<std::string>& b) {
    std::set<std::string> universe = a;
    universe.insert(b.begin(), b.end());
    std::uint64_t inter = 0;
    std::uint64_t uni = 0;
    for (const auto& x : universe) {
        const bool in_a = a.count(x) > 0;
        const bool in_b = b.count(x) > 0;
        if (in_a || in_b) ++uni;
        if (in_a && in_b) ++inter;
    }
    return {inter, uni};
}

// Reduced ratio compare helper: does n1/d1 equal n2/d2 exactly?
inline bool same_ratio(std::uint64_t n1, std::uint64_t d1, std::uint64_t n2, std::uint64_t d2) {
    if (d1 == 0 || d2 == 0) return false;
    return static_cast<unsigned __int128>(n1) * d2 == static_cast<unsigned __int128>(n2) * d1;
}

}  // namespace oracle
