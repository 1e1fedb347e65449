// Arbitrary-precision integer/rational aliases and low-level numeric helpers.
#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace heightlab {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

inline Int num(const Rational& q) { return numerator(q); }
inline Int den(const Rational& q) { return denominator(q); }

inline Rational make_rational(Int n, Int d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    Rational q(std::move(n), std::move(d));
    // mpq construction from components does not canonicalize.
    mpq_canonicalize(q.backend().data());
    return q;
}

// Accepts "a" or "a/b" with optional leading '-' (or '+'), ASCII digits only.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    auto check_int = [&](const std::string& s) {
        if (s.empty()) throw ParseError("malformed rational: '" + text + "'");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw ParseError("malformed rational: '" + text + "'");
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                throw ParseError("malformed rational: '" + text + "'");
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        check_int(text);
        return Rational(Int(text));
    }
    const std::string ns = text.substr(0, slash);
    const std::string ds = text.substr(slash + 1);
    check_int(ns);
    check_int(ds);
    Int d(ds);
    if (d == 0) throw ParseError("zero denominator: '" + text + "'");
    return make_rational(Int(ns), std::move(d));
}

inline std::string to_string(const Rational& q) {
    if (den(q) == 1) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

// x = mantissa * 2^exponent with |mantissa| in [0.5, 1); zero maps to (0, 0).
inline std::pair<double, long> to_double_2exp(const Int& x) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, x.backend().data());
    return {m, e};
}

// Natural log of |x| for x != 0, accurate to ~1 ulp even for huge operands.
inline double log_abs_int(const Int& x) {
    if (x == 0) throw DomainError("log of zero");
    auto [m, e] = to_double_2exp(x);
    return std::log(std::fabs(m)) + static_cast<double>(e) * M_LN2;
}

inline double log_abs_rational(const Rational& q) {
    if (q == 0) throw DomainError("log of zero");
    return log_abs_int(num(q)) - log_abs_int(den(q));
}

// Exponent of p in x (x != 0, p >= 2); also yields x / p^exponent.
inline long remove_factor(const Int& x, const Int& p, Int& cofactor) {
    if (x == 0) throw DomainError("valuation of zero undefined");
    mpz_t rop;
    mpz_init(rop);
    const auto count =
        mpz_remove(rop, x.backend().data(), p.backend().data());
    cofactor = Int(rop);
    mpz_clear(rop);
    return static_cast<long>(count);
}

inline long valuation(const Int& x, const Int& p) {
    Int dropped;
    return remove_factor(x, p, dropped);
}

inline std::size_t hash_rational(const Rational& q) {
    const auto lo = [](const Int& x) {
        return static_cast<std::uint64_t>(x & Int(std::numeric_limits<std::uint64_t>::max()));
    };
    std::uint64_t h = lo(abs(num(q))) * 0x9e3779b97f4a7c15ULL;
    h ^= lo(den(q)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    if (q < 0) h = ~h;
    return static_cast<std::size_t>(h);
}

}  // namespace heightlab
