// Homogeneous integer binary forms in (t1, t2): content, gcd, resultants,
// exact and renormalized-floating evaluation, canonical serialization.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heightlab/bigint.hpp"
#include "heightlab/qfield.hpp"
#include "heightlab/upoly.hpp"

namespace heightlab {

// coeff(k) multiplies t1^k t2^(d-k). A form of degree d has exactly d+1
// coefficient slots; the zero form is flagged and carries no degree.
class BinaryForm {
  public:
    BinaryForm() : zero_(true) {}  // default-constructs the zero form

    static BinaryForm zero() { return BinaryForm(); }

    static BinaryForm constant(Int c) {
        if (c == 0) return zero();
        return BinaryForm(std::vector<Int>{std::move(c)});
    }

    explicit BinaryForm(std::vector<Int> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty() || upoly::is_zero(coeffs_)) {
            coeffs_.clear();
            zero_ = true;
        }
    }

    bool is_zero() const { return zero_; }

    int degree() const {
        if (zero_) throw DomainError("zero form carries no degree");
        return static_cast<int>(coeffs_.size()) - 1;
    }

    const Int& coeff(int k) const {
        if (zero_ || k < 0 || k > degree()) throw DomainError("coefficient index out of range");
        return coeffs_[static_cast<std::size_t>(k)];
    }

    const std::vector<Int>& coeffs() const { return coeffs_; }

    // Largest k with coeff(k) != 0 (the degree in t1 alone).
    int top_t1_degree() const {
        if (zero_) throw DomainError("zero form has no top degree");
        return upoly::deg(coeffs_);
    }

    // Multiplicity of t2 as a factor.
    int t2_multiplicity() const { return degree() - top_t1_degree(); }

    // f(t, 1), coefficients ascending: identical to the coefficient vector.
    upoly::Poly dehomogenized() const {
        if (zero_) throw DomainError("dehomogenization of zero form");
        upoly::Poly p = coeffs_;
        upoly::normalize(p);
        return p;
    }

    // Lift a univariate polynomial (deg <= d) to a form of degree d.
    static BinaryForm homogenized(const upoly::Poly& p, int d) {
        if (upoly::is_zero(p)) return zero();
        if (upoly::deg(p) > d) throw DomainError("polynomial degree exceeds form degree");
        std::vector<Int> c(static_cast<std::size_t>(d) + 1, Int(0));
        for (std::size_t i = 0; i < p.size(); ++i) c[i] = p[i];
        return BinaryForm(std::move(c));
    }

    friend BinaryForm operator*(const BinaryForm& f, const BinaryForm& g) {
        if (f.zero_ || g.zero_) return zero();
        std::vector<Int> out(f.coeffs_.size() + g.coeffs_.size() - 1, Int(0));
        for (std::size_t i = 0; i < f.coeffs_.size(); ++i) {
            if (f.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < g.coeffs_.size(); ++j)
                if (g.coeffs_[j] != 0) out[i + j] += f.coeffs_[i] * g.coeffs_[j];
        }
        return BinaryForm(std::move(out));
    }

    friend BinaryForm operator*(const Int& s, const BinaryForm& f) {
        if (s == 0 || f.zero_) return zero();
        std::vector<Int> out = f.coeffs_;
        for (auto& c : out) c *= s;
        return BinaryForm(std::move(out));
    }

    friend BinaryForm operator+(const BinaryForm& f, const BinaryForm& g) {
        if (f.zero_) return g;
        if (g.zero_) return f;
        if (f.degree() != g.degree()) throw DomainError("adding forms of unequal degree");
        std::vector<Int> out = f.coeffs_;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += g.coeffs_[i];
        return BinaryForm(std::move(out));
    }

    friend BinaryForm operator-(const BinaryForm& f, const BinaryForm& g) {
        if (g.zero_) return f;
        return f + Int(-1) * g;
    }

    // Multiply by t2^k (raises the degree, keeps t1-coefficients in place).
    BinaryForm times_t2_power(int k) const {
        if (zero_) return zero();
        std::vector<Int> out(coeffs_.size() + static_cast<std::size_t>(k), Int(0));
        for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = coeffs_[i];
        return BinaryForm(std::move(out));
    }

    // Multiply by t1^k (shifts the coefficient vector up by k slots).
    BinaryForm times_t1_power(int k) const {
        if (zero_) return zero();
        std::vector<Int> out(coeffs_.size() + static_cast<std::size_t>(k), Int(0));
        for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i + static_cast<std::size_t>(k)] = coeffs_[i];
        return BinaryForm(std::move(out));
    }

    friend bool operator==(const BinaryForm& f, const BinaryForm& g) {
        return f.zero_ == g.zero_ && f.coeffs_ == g.coeffs_;
    }

    std::size_t coefficient_bits() const {
        std::size_t total = 0;
        for (const auto& c : coeffs_)
            if (c != 0) total += msb(abs(c)) + 1;
        return total;
    }

  private:
    std::vector<Int> coeffs_;
    bool zero_ = false;
};

inline std::pair<Int, BinaryForm> content_and_primitive(const BinaryForm& f) {
    if (f.is_zero()) throw DomainError("content of zero form");
    const Int c = upoly::content(f.coeffs());
    std::vector<Int> out = f.coeffs();
    for (auto& x : out) x /= c;
    return {c, BinaryForm(std::move(out))};
}

// Primitive common divisor of maximal degree, positive leading coefficient.
// Shared t2-powers are split off first; what remains has a nonzero top
// coefficient on each side, so the univariate gcd of the dehomogenizations
// carries the rest.
inline BinaryForm form_gcd(const BinaryForm& f, const BinaryForm& g) {
    if (f.is_zero() || g.is_zero()) throw DomainError("form gcd with zero form");
    const int shared_t2 = std::min(f.t2_multiplicity(), g.t2_multiplicity());
    upoly::Poly a = f.dehomogenized(), b = g.dehomogenized();
    upoly::Poly h = upoly::primitive(upoly::sr_gcd(std::move(a), std::move(b)));
    const int dh = upoly::deg(h);
    return BinaryForm::homogenized(h, dh).times_t2_power(shared_t2);
}

// Quotient f / g for an exact form division.
inline BinaryForm form_divide_exact(const BinaryForm& f, const BinaryForm& g) {
    if (g.is_zero()) throw DomainError("division by zero form");
    if (f.is_zero()) return BinaryForm::zero();
    const int dq = f.degree() - g.degree();
    if (dq < 0) throw DomainError("inexact form division");
    if (f.t2_multiplicity() < g.t2_multiplicity()) throw DomainError("inexact form division");
    // The univariate quotient has degree dq minus the quotient's own
    // t2-multiplicity; homogenizing at dq restores exactly that padding.
    upoly::Poly q = upoly::divide_exact(f.dehomogenized(), g.dehomogenized());
    return BinaryForm::homogenized(q, dq);
}

// A pair of degree-d forms, jointly content-free and coprime as forms.
struct BinaryFormPair {
    BinaryForm a;
    BinaryForm b;

    int degree() const { return a.degree(); }

    // Validates the representation invariants (equal degrees, joint content
    // one, coprimality). Quadratic-ish in the degree; meant for inputs of
    // moderate size, internal constructions maintain the invariants directly.
    static BinaryFormPair checked(BinaryForm a, BinaryForm b) {
        if (a.is_zero() || b.is_zero()) throw DomainError("pair forms must be nonzero");
        if (a.degree() != b.degree()) throw DomainError("pair forms must share a degree");
        Int joint = gcd(upoly::content(a.coeffs()), upoly::content(b.coeffs()));
        if (joint != 1) throw DomainError("pair has nontrivial joint content");
        if (form_gcd(a, b).degree() != 0) throw DomainError("pair forms share a factor");
        return {std::move(a), std::move(b)};
    }
};

namespace detail {

// Fraction-free (Bareiss) determinant; exact over Int.
inline Int bareiss_determinant(std::vector<std::vector<Int>> m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) { piv = i; break; }
            if (piv < 0) return 0;
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

// 2d x 2d Sylvester determinant of the full-length coefficient vectors,
// rows in descending coefficient order.
inline Int resultant_sylvester(const BinaryFormPair& pair) {
    const int d = pair.degree();
    const int n = 2 * d;
    std::vector<std::vector<Int>> s(static_cast<std::size_t>(n),
                                    std::vector<Int>(static_cast<std::size_t>(n), Int(0)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= d; ++j) {
            s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + j)] = pair.a.coeff(d - j);
            s[static_cast<std::size_t>(d + i)][static_cast<std::size_t>(i + j)] = pair.b.coeff(d - j);
        }
    return bareiss_determinant(std::move(s));
}

// Same value through the subresultant PRS: strip the t2-padding (top
// coefficient drops) down to the exact-degree univariate resultant and
// fold the padding back in as powers of (-1)^d lc.
inline Int resultant_prs(const BinaryFormPair& pair) {
    const int d = pair.degree();
    const int ma = pair.a.top_t1_degree(), mb = pair.b.top_t1_degree();
    if (ma < d && mb < d) return 0;  // both divisible by t2: shared root (1,0)
    Int swap_sign = 1;
    const BinaryForm* lo = &pair.a;
    const BinaryForm* hi = &pair.b;
    int mlo = ma;
    if (mb < d) {
        std::swap(lo, hi);
        mlo = mb;
        if (d % 2 == 1) swap_sign = -1;  // Res(B,A) = (-1)^(d^2) Res(A,B)
    }
    const upoly::Poly plo = lo->dehomogenized(), phi = hi->dehomogenized();
    Int pad = 1;
    if (mlo < d) {
        Int base = upoly::lc(phi);
        if (d % 2 == 1) base = -base;
        pad = pow(base, static_cast<unsigned>(d - mlo));
    }
    return swap_sign * pad * upoly::sr_resultant(plo, phi);
}

}  // namespace detail

// Determinant of the 2d x 2d Sylvester matrix of the two length-(d+1)
// coefficient vectors. Zero is a legal return (shared projective root).
// Degrees above the direct-elimination range go through the subresultant
// route, which computes the identical integer.
inline Int resultant(const BinaryFormPair& pair) {
    const int d = pair.degree();
    if (d < 1) throw DomainError("resultant requires degree >= 1");
    if (d <= 16) return detail::resultant_sylvester(pair);
    return detail::resultant_prs(pair);
}

namespace detail {

inline Rational rational_pow(const Rational& x, int e) {
    Rational acc = 1;
    for (int i = 0; i < e; ++i) acc *= x;
    return acc;
}

}  // namespace detail

// Exact evaluation at a rational point.
inline Rational eval_exact(const BinaryForm& f, const Rational& t1, const Rational& t2) {
    if (f.is_zero()) return Rational(0);
    const int d = f.degree();
    if (t2 == 0) return Rational(f.coeff(d)) * detail::rational_pow(t1, d);
    // Horner in t1/t2, scaled back by t2^d.
    const Rational u = t1 / t2;
    Rational acc = 0;
    for (int k = d; k >= 0; --k) acc = acc * u + Rational(f.coeff(k));
    return acc * detail::rational_pow(t2, d);
}

namespace detail {

// log |f(z1, z2)| for complex points; the point is renormalized to unit
// max-norm and d*log||point|| added back, and coefficients enter as
// mantissa * 2^exp so that arbitrarily large integers cannot overflow.
template <class Real = double>
Real eval_log_abs_complex(const BinaryForm& f, std::complex<Real> z1, std::complex<Real> z2) {
    if (f.is_zero()) return -std::numeric_limits<Real>::infinity();
    const int d = f.degree();
    const Real s = std::max(std::abs(z1), std::abs(z2));
    if (s == Real(0)) throw DomainError("form evaluation at (0,0)");
    z1 /= s;
    z2 /= s;
    long e_max = std::numeric_limits<long>::min();
    std::vector<std::pair<double, long>> sc(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        sc[static_cast<std::size_t>(k)] = to_double_2exp(f.coeff(k));
        if (f.coeff(k) != 0) e_max = std::max(e_max, sc[static_cast<std::size_t>(k)].second);
    }
    auto scaled_coeff = [&](int k) -> Real {
        const auto& [m, e] = sc[static_cast<std::size_t>(k)];
        if (m == 0.0) return Real(0);
        return static_cast<Real>(std::ldexp(m, static_cast<int>(std::max<long>(e - e_max, -16000L))));
    };
    std::complex<Real> acc(0, 0);
    Real base_log;
    if (std::abs(z2) >= std::abs(z1)) {
        const std::complex<Real> u = z1 / z2;
        for (int k = d; k >= 0; --k) acc = acc * u + scaled_coeff(k);
        base_log = std::log(std::abs(z2));
    } else {
        const std::complex<Real> u = z2 / z1;
        for (int k = 0; k <= d; ++k) acc = acc * u + scaled_coeff(k);
        base_log = std::log(std::abs(z1));
    }
    if (acc == std::complex<Real>(0, 0)) return -std::numeric_limits<Real>::infinity();
    return std::log(std::abs(acc)) + static_cast<Real>(e_max) * static_cast<Real>(M_LN2) +
           static_cast<Real>(d) * (base_log + std::log(s));
}

}  // namespace detail

// log max(|A(point)|_v, |B(point)|_v) at an exact rational point.
inline LogAbs eval_lognorm(const BinaryFormPair& pair, const Rational& t1, const Rational& t2,
                           const Place& v) {
    if (t1 == 0 && t2 == 0) throw DomainError("lognorm at (0,0)");
    const Rational va = eval_exact(pair.a, t1, t2);
    const Rational vb = eval_exact(pair.b, t1, t2);
    if (va == 0 && vb == 0) throw DomainError("pair vanishes at the point (shared root?)");
    if (v.is_archimedean()) {
        double la = va == 0 ? -std::numeric_limits<double>::infinity() : log_abs_rational(va);
        double lb = vb == 0 ? -std::numeric_limits<double>::infinity() : log_abs_rational(vb);
        return {std::max(la, lb), false, 0};
    }
    long m;  // log max = -min(v_p A, v_p B) * log p
    if (va == 0) {
        m = -padic_val(vb, v.prime());
    } else if (vb == 0) {
        m = -padic_val(va, v.prime());
    } else {
        m = -std::min(padic_val(va, v.prime()), padic_val(vb, v.prime()));
    }
    return {static_cast<double>(m) * v.log_prime(), true, m};
}

// Archimedean lognorm at a complex point.
template <class Real = double>
Real eval_lognorm_arch(const BinaryFormPair& pair, const std::complex<Real>& t1,
                       const std::complex<Real>& t2) {
    if (t1 == std::complex<Real>(0, 0) && t2 == std::complex<Real>(0, 0))
        throw DomainError("lognorm at (0,0)");
    return std::max(detail::eval_log_abs_complex<Real>(pair.a, t1, t2),
                    detail::eval_log_abs_complex<Real>(pair.b, t1, t2));
}

// Canonical pair serialization used by the on-disk cache.
inline std::string to_bfp(const BinaryFormPair& pair) {
    std::ostringstream os;
    const int d = pair.degree();
    os << "BFP v1 deg=" << d << "\n";
    for (const BinaryForm* f : {&pair.a, &pair.b}) {
        for (int k = 0; k <= d; ++k) {
            if (k) os << ' ';
            os << f->coeff(k);
        }
        os << "\n";
    }
    return os.str();
}

inline BinaryFormPair parse_bfp(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("missing BFP header");
    int d = -1;
    {
        std::istringstream hs(header);
        std::string tag, ver, degtok;
        hs >> tag >> ver >> degtok;
        if (tag != "BFP" || ver != "v1" || degtok.rfind("deg=", 0) != 0)
            throw ParseError("bad BFP header: '" + header + "'");
        d = std::stoi(degtok.substr(4));
        if (d < 0) throw ParseError("bad BFP degree");
    }
    auto read_form = [&](const char* which) {
        std::string line;
        if (!std::getline(in, line)) throw ParseError(std::string("missing BFP ") + which + " line");
        std::istringstream ls(line);
        std::vector<Int> c;
        std::string tok;
        while (ls >> tok) c.emplace_back(tok);
        if (static_cast<int>(c.size()) != d + 1)
            throw ParseError(std::string("BFP ") + which + " coefficient count mismatch");
        return BinaryForm(std::move(c));
    };
    BinaryForm a = read_form("A");
    BinaryForm b = read_form("B");
    if (a.is_zero() || b.is_zero()) throw ParseError("BFP forms must be nonzero");
    return BinaryFormPair{std::move(a), std::move(b)};
}

}  // namespace heightlab
