#pragma once

#include <cstdint>
#include <numeric>
#include <string>

namespace routesim {

// Exact non-negative rational. Similarity scores and access frequencies are
// kept as (num, den) so ties compare exactly; floating point appears only at
// reporting boundaries. Always stored reduced with den >= 1 (0 -> 0/1).
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Ratio reduced(std::uint64_t n, std::uint64_t d) {
        if (d == 0 || n == 0) return Ratio{0, 1};
        const std::uint64_t g = std::gcd(n, d);
        return Ratio{n / g, d / g};
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Ratio& a, const Ratio& b) { return !(a == b); }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        using u128 = unsigned __int128;
        return static_cast<u128>(a.num) * b.den < static_cast<u128>(b.num) * a.den;
    }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
    friend bool operator>=(const Ratio& a, const Ratio& b) { return !(a < b); }
};

}  // namespace routesim
