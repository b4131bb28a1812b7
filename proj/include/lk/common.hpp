#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double v) { return std::isinf(v) && v > 0; }

// Conjugate index: 1/r + 1/r' = 1, with 1' = inf and inf' = 1.
inline double conj_index(double r) {
    if (is_inf(r)) return 1.0;
    if (r == 1.0) return kInf;
    return r / (r - 1.0);
}

// Reciprocal with the extended-real conventions c/inf = 0, c/0 = inf.
inline double recip_index(double r) {
    if (is_inf(r)) return 0.0;
    if (r == 0.0) return kInf;
    return 1.0 / r;
}

// Which endpoint a germ or coordinate refers to.
enum class Side { Zero, Inf };

inline Side other(Side s) { return s == Side::Zero ? Side::Inf : Side::Zero; }

// A point t in (0,inf) addressed by Y = |log t|, so that Y up to ~1e300 is
// representable even though t itself would under/overflow.
struct LogCoord {
    Side side = Side::Zero;
    double y = 0.0;  // y >= 0

    static LogCoord from_t(double t) {
        if (!(t > 0)) throw std::invalid_argument("LogCoord: t must be positive");
        return t < 1.0 ? LogCoord{Side::Zero, -std::log(t)} : LogCoord{Side::Inf, std::log(t)};
    }
    // log t (signed). Always finite even when t is not representable.
    double log_t() const { return side == Side::Zero ? -y : y; }
    // Materialize t; may underflow to 0 or overflow to inf.
    double t() const { return std::exp(log_t()); }
};

// Iterated logarithm ell_1(t) = 1 + |log t|, ell_i = ell_1 o ell_{i-1},
// evaluated through Y = |log t|.
inline double ell(int tier, const LogCoord& at) {
    assert(tier >= 1);
    double v = 1.0 + at.y;
    for (int i = 1; i < tier; ++i) v = 1.0 + std::log(v);
    return v;
}

inline double log_ell(int tier, const LogCoord& at) { return std::log(ell(tier, at)); }

// Stable log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(exp(a) - exp(b)) for a > b.
inline double log_sub(double a, double b) {
    if (b == -kInf) return a;
    assert(a >= b);
    if (a == b) return -kInf;
    return a + std::log1p(-std::exp(b - a));
}

// Exact rational arithmetic for interpolation parameters. Reciprocal indices
// 1/p live in [0,1], so magnitudes stay tiny and overflow is not a concern.
struct Frac {
    long long num = 0;
    long long den = 1;

    Frac() = default;
    Frac(long long n) : num(n), den(1) {}
    Frac(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Frac: zero denominator");
        normalize();
    }
    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }
    double value() const { return double(num) / double(den); }
    bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Frac& o) const { return !(*this == o); }
    bool operator<(const Frac& o) const { return num * o.den < o.num * den; }
    bool operator<=(const Frac& o) const { return num * o.den <= o.num * den; }
    Frac operator+(const Frac& o) const { return Frac(num * o.den + o.num * den, den * o.den); }
    Frac operator-(const Frac& o) const { return Frac(num * o.den - o.num * den, den * o.den); }
    Frac operator*(const Frac& o) const { return Frac(num * o.num, den * o.den); }
    Frac operator/(const Frac& o) const {
        if (o.num == 0) throw std::invalid_argument("Frac: division by zero");
        return Frac(num * o.den, den * o.num);
    }
};

// Parse "inf", decimals ("1.5") and ratios ("4/3") into an exact Frac of 1/x.
// Returns 1/x so that x = inf maps to 0 exactly.
inline Frac parse_recip_index(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "oo") return Frac(0);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        long long n = std::stoll(s.substr(0, slash));
        long long d = std::stoll(s.substr(slash + 1));
        return Frac(d, n);  // 1/(n/d) = d/n
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Frac(1, std::stoll(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    long long scale = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) scale *= 10;
    return Frac(scale, std::stoll(digits));
}

// Deterministic 64-bit generator (splitmix64); used wherever seeded
// reproducibility is part of the contract.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + int(next() % uint64_t(hi - lo + 1));
    }
};

}  // namespace lk
