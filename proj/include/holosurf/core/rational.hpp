#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "holosurf/core/errors.hpp"

namespace holosurf {

using Rational = mpq_class;

/// Point in R^n with exact coordinates.
using RationalPoint = std::vector<Rational>;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Exact conversion; every finite binary64 value is a dyadic rational.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw ValidationError("NonFiniteValue", "cannot convert a non-finite double to a rational");
    return Rational(x);
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Parses "p/q", "p" or a plain decimal such as "-0.125" or "1e-3".
/// Decimal strings are read exactly (as base-10 fractions), never via binary64.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto fail = [&]() -> Rational { throw ValidationError("BadRational", "cannot parse rational '" + s + "'"); };
    if (s.empty()) return fail();
    if (s.find('/') != std::string::npos) {
        Rational q;
        if (q.set_str(s, 10) != 0) return fail();
        if (q.get_den() == 0) return fail();
        q.canonicalize();
        return q;
    }
    // decimal with optional exponent
    std::size_t pos = 0;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
    std::string digits;
    long exp10 = 0;
    bool seen_dot = false, any = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any = true;
            if (seen_dot) --exp10;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any) return fail();
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') return fail();
        ++pos;
        try {
            std::size_t used = 0;
            long e = std::stol(s.substr(pos), &used);
            if (pos + used != s.size()) return fail();
            exp10 += e;
        } catch (...) {
            return fail();
        }
    }
    mpz_class mant(digits, 10);
    if (neg) mant = -mant;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational q = exp10 >= 0 ? Rational(mant * pow10) : Rational(mant, pow10);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline mpz_class lcm(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

/// Floor of a rational as an integer.
inline mpz_class floor(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

/// Best rational approximation with denominator at most max_den (continued fractions).
inline Rational rationalize(double x, long max_den = 1000000) {
    if (!std::isfinite(x)) throw ValidationError("NonFiniteValue", "cannot rationalize a non-finite value");
    bool neg = x < 0;
    double v = std::fabs(x);
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = v;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        if (a > 9.0e15) break;
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = r - a;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    if (q1 == 0) return Rational(0);
    Rational q(neg ? -p1 : p1, q1);
    q.canonicalize();
    return q;
}

inline std::vector<double> to_double(std::span<const Rational> p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].get_d();
    return out;
}

inline RationalPoint rational_point(std::span<const double> p) {
    RationalPoint out;
    out.reserve(p.size());
    for (double x : p) out.push_back(rational_from_double(x));
    return out;
}

struct RationalPointHash {
    std::size_t operator()(const RationalPoint& p) const noexcept {
        std::size_t h = 0x9e3779b97f4a7c15ull;
        for (const auto& c : p) {
            std::size_t k = std::hash<std::string>{}(c.get_num().get_str(16)) * 31u + mpz_get_ui(c.get_den_mpz_t());
            h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace holosurf
