// Univariate integer polynomials: content, pseudo-division, subresultant
// PRS gcd and resultant, exact division. Coefficients ascending by degree.
#pragma once

#include <algorithm>
#include <vector>

#include "heightlab/bigint.hpp"

namespace heightlab::upoly {

using Poly = std::vector<Int>;

inline void normalize(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline bool is_zero(const Poly& p) {
    return std::all_of(p.begin(), p.end(), [](const Int& c) { return c == 0; });
}

// Degree of a normalized polynomial; -1 for the zero polynomial.
inline int deg(const Poly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[static_cast<std::size_t>(i)] != 0) return i;
    return -1;
}

inline const Int& lc(const Poly& p) {
    const int d = deg(p);
    if (d < 0) throw DomainError("leading coefficient of zero polynomial");
    return p[static_cast<std::size_t>(d)];
}

inline Int content(const Poly& p) {
    Int g = 0;
    for (const auto& c : p) g = gcd(g, c);
    return abs(g);
}

inline Poly scaled(Poly p, const Int& s) {
    for (auto& c : p) c *= s;
    return p;
}

// Divides every coefficient by s, which must divide exactly.
inline Poly divided_by_scalar(Poly p, const Int& s) {
    if (s == 0) throw DomainError("division by zero scalar");
    for (auto& c : p) {
        if (c % s != 0) throw DomainError("inexact scalar division of polynomial");
        c /= s;
    }
    return p;
}

// Content removed and leading coefficient made positive.
inline Poly primitive(const Poly& p) {
    const int d = deg(p);
    if (d < 0) throw DomainError("primitive part of zero polynomial");
    Int c = content(p);
    if (p[static_cast<std::size_t>(d)] < 0) c = -c;
    Poly out = divided_by_scalar(p, c);
    normalize(out);
    return out;
}

inline Poly mul(const Poly& a, const Poly& b) {
    if (is_zero(a) || is_zero(b)) return {};
    Poly out(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) out[i + j] += a[i] * b[j];
    }
    normalize(out);
    return out;
}

inline Poly sub(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    normalize(out);
    return out;
}

// Pseudo-remainder: returns R with lc(B)^(deg A - deg B + 1) * A = Q*B + R.
inline Poly prem(Poly a, const Poly& b) {
    normalize(a);
    const int db = deg(b);
    if (db < 0) throw DomainError("pseudo-division by zero polynomial");
    int da = deg(a);
    if (da < db) return a;  // identity holds with exponent 0
    const Int d = lc(b);
    int e = da - db + 1;
    Poly r = std::move(a);
    while (true) {
        const int dr = deg(r);
        if (dr < db || dr < 0) break;
        // r <- d*r - lc(r) * x^(dr-db) * b
        const Int rl = lc(r);
        Poly next(std::max<std::size_t>(r.size(), static_cast<std::size_t>(dr + 1)), Int(0));
        for (std::size_t i = 0; i < r.size(); ++i) next[i] = r[i] * d;
        for (int j = 0; j <= db; ++j)
            next[static_cast<std::size_t>(dr - db + j)] -= rl * b[static_cast<std::size_t>(j)];
        r = std::move(next);
        normalize(r);
        --e;
    }
    if (e > 0) r = scaled(std::move(r), pow(d, static_cast<unsigned>(e)));
    return r;
}

// Integer gcd via the subresultant polynomial remainder sequence.
// Result is primitive with positive leading coefficient, scaled by the
// gcd of the contents.
inline Poly sr_gcd(Poly a, Poly b) {
    normalize(a);
    normalize(b);
    if (is_zero(a) && is_zero(b)) throw DomainError("gcd of two zero polynomials");
    if (is_zero(a)) return primitive(b);
    if (is_zero(b)) return primitive(a);
    if (deg(a) < deg(b)) std::swap(a, b);
    const Int ca = content(a), cb = content(b);
    const Int d = gcd(ca, cb);
    a = divided_by_scalar(std::move(a), ca);
    b = divided_by_scalar(std::move(b), cb);
    Int g = 1, h = 1;
    while (true) {
        const int delta = deg(a) - deg(b);
        Poly r = prem(a, b);
        if (is_zero(r)) break;
        if (deg(r) == 0) {
            b = {Int(1)};
            break;
        }
        a = std::move(b);
        b = divided_by_scalar(std::move(r), g * pow(h, static_cast<unsigned>(delta)));
        g = lc(a);
        if (delta > 0) {
            Int gd = pow(g, static_cast<unsigned>(delta));
            if (delta > 1) {
                const Int hd = pow(h, static_cast<unsigned>(delta - 1));
                if (gd % hd != 0) throw DomainError("subresultant bookkeeping failure");
                gd /= hd;
            }
            h = gd;
        }
    }
    Poly out = primitive(b);
    return scaled(std::move(out), d);
}

// Resultant of a and b taken at their exact degrees, via the subresultant
// PRS (fraction-free; no determinant is formed).
inline Int sr_resultant(Poly a, Poly b) {
    normalize(a);
    normalize(b);
    if (is_zero(a) || is_zero(b)) return 0;
    Int s = 1;
    if (deg(a) < deg(b)) {
        if ((deg(a) & 1) && (deg(b) & 1)) s = -1;
        std::swap(a, b);
    }
    if (deg(b) == 0) return s * pow(b[0], static_cast<unsigned>(deg(a)));
    const Int ca = content(a), cb = content(b);
    a = divided_by_scalar(std::move(a), ca);
    b = divided_by_scalar(std::move(b), cb);
    Int t = pow(ca, static_cast<unsigned>(deg(b))) * pow(cb, static_cast<unsigned>(deg(a)));
    Int g = 1, h = 1;
    while (true) {
        const int delta = deg(a) - deg(b);
        if ((deg(a) & 1) && (deg(b) & 1)) s = -s;
        Poly r = prem(a, b);
        a = std::move(b);
        b = divided_by_scalar(std::move(r), g * pow(h, static_cast<unsigned>(delta)));
        if (is_zero(b)) return 0;
        g = lc(a);
        if (delta > 0) {
            Int gd = pow(g, static_cast<unsigned>(delta));
            if (delta > 1) {
                const Int hd = pow(h, static_cast<unsigned>(delta - 1));
                if (gd % hd != 0) throw DomainError("subresultant bookkeeping failure");
                gd /= hd;
            }
            h = gd;
        }
        if (deg(b) == 0) break;
    }
    // deg(b) == 0 here; fold in the final correction h^(1-deg a) lc(b)^(deg a)
    const int da = deg(a);
    Int hb = pow(b[0], static_cast<unsigned>(da));
    if (da > 1) {
        const Int hd = pow(h, static_cast<unsigned>(da - 1));
        if (hb % hd != 0) throw DomainError("subresultant bookkeeping failure");
        hb /= hd;
    }
    return s * t * hb;
}

// Exact quotient of a by b (throws if the division leaves a remainder).
inline Poly divide_exact(Poly a, const Poly& b) {
    normalize(a);
    const int db = deg(b);
    if (db < 0) throw DomainError("division by zero polynomial");
    if (is_zero(a)) return {};
    int da = deg(a);
    if (da < db) throw DomainError("inexact polynomial division");
    Poly q(static_cast<std::size_t>(da - db + 1), Int(0));
    const Int& bl = lc(b);
    while (!is_zero(a)) {
        da = deg(a);
        if (da < db) throw DomainError("inexact polynomial division");
        const Int& al = a[static_cast<std::size_t>(da)];
        if (al % bl != 0) throw DomainError("inexact polynomial division");
        const Int qc = al / bl;
        q[static_cast<std::size_t>(da - db)] = qc;
        for (int j = 0; j <= db; ++j)
            a[static_cast<std::size_t>(da - db + j)] -= qc * b[static_cast<std::size_t>(j)];
        normalize(a);
    }
    normalize(q);
    return q;
}

inline Rational eval(const Poly& p, const Rational& x) {
    Rational acc = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        acc = acc * x + Rational(p[static_cast<std::size_t>(i)]);
    return acc;
}

inline Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {};
    Poly out(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * Int(i);
    normalize(out);
    return out;
}

}  // namespace heightlab::upoly
