// The Per1(lambda) family f_t(z) = lambda*z / (z^2 + t*z + 1): exact orbit
// iteration, the critical-orbit lifts F_n with common-factor removal, and
// periodic-parameter polynomials.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "heightlab/bigint.hpp"
#include "heightlab/polyforms.hpp"
#include "heightlab/qfield.hpp"
#include "heightlab/upoly.hpp"

namespace heightlab {

// Parameter of the family; rational roots of unity (and 0) are excluded.
class Lambda {
  public:
    explicit Lambda(Rational v) : value_(std::move(v)) {
        if (value_ == 0 || value_ == 1 || value_ == -1)
            throw DomainError("lambda must be nonzero and not a root of unity");
    }
    const Rational& value() const { return value_; }
    Int numerator() const { return num(value_); }
    Int denominator() const { return den(value_); }

  private:
    Rational value_;
};

enum class CriticalSign : int { plus = +1, minus = -1 };

inline int sign_value(CriticalSign s) { return static_cast<int>(s); }
inline std::string sign_label(CriticalSign s) { return s == CriticalSign::plus ? "+" : "-"; }

// Value of f_t(z); the pole (z^2 + t z + 1 = 0) is a value, not an error.
struct FtValue {
    bool pole = false;
    Rational value;
};

inline FtValue f_apply(const Lambda& lambda, const Rational& t, const Rational& z) {
    const Rational d = z * z + t * z + 1;
    if (d == 0) return {true, Rational(0)};
    return {false, lambda.value() * z / d};
}

struct OrbitPoint {
    bool at_infinity = false;
    Rational z;
};

struct OrbitReport {
    enum class Status { preperiodic, budget_exhausted, hit_pole };
    Status status = Status::budget_exhausted;
    std::vector<OrbitPoint> points;  // points[0] is the starting critical point
    int tail = -1;                   // valid when preperiodic
    int period = 0;                  // valid when preperiodic
    bool height_blowup = false;      // budget_exhausted via the height filter
};

// Exact iteration with cycle detection by hashing reduced fractions.
// Stops early (BudgetExhausted, height_blowup set) once the Weil height of
// an iterate exceeds h0 + n*log(4): preperiodic rational orbits have
// bounded height, so past the bound the orbit cannot close up.
inline OrbitReport critical_orbit(const Lambda& lambda, const Rational& t, CriticalSign s,
                                  int budget, double blowup_h0 = 8.0) {
    if (budget < 1) throw DomainError("orbit budget must be >= 1");
    OrbitReport rep;
    Rational z = Rational(sign_value(s));
    struct RatHash {
        std::size_t operator()(const Rational& q) const { return hash_rational(q); }
    };
    std::unordered_map<Rational, int, RatHash> seen;
    rep.points.push_back({false, z});
    seen.emplace(z, 0);
    const double log4 = 2.0 * M_LN2;
    for (int n = 1; n <= budget; ++n) {
        const FtValue fv = f_apply(lambda, t, z);
        if (fv.pole) {
            rep.points.push_back({true, Rational(0)});
            rep.status = OrbitReport::Status::hit_pole;
            return rep;
        }
        z = fv.value;
        const auto it = seen.find(z);
        rep.points.push_back({false, z});
        if (it != seen.end()) {
            rep.status = OrbitReport::Status::preperiodic;
            rep.tail = it->second;
            rep.period = n - it->second;
            return rep;
        }
        seen.emplace(z, n);
        if (weil_height(z) > blowup_h0 + n * log4) {
            rep.status = OrbitReport::Status::budget_exhausted;
            rep.height_blowup = true;
            return rep;
        }
    }
    rep.status = OrbitReport::Status::budget_exhausted;
    return rep;
}

// Homogeneous lift coordinate choice. The family's own homogenization has
// first coordinate lambda*t2*z1*z2; the paper_literal switch selects
// lambda*t2*z1^2 instead.
enum class LiftKind { standard, paper_literal };

inline std::string lift_label(LiftKind k) { return k == LiftKind::standard ? "std" : "paper-literal"; }

struct BuildLimits {
    std::size_t max_total_coefficient_bits = 1'000'000'000;  // memory guard
};

struct FnEntry {
    BinaryFormPair pair;
    BinaryForm removed_gcd;  // g_n, primitive, positive leading coefficient
    Int removed_content;     // positive integer content stripped at this step
    int degree = 0;          // d_n
};

// F_n^s for n = 1..n_max. entry(n) is 1-based; the sequence starts from the
// constant pair (s*1, 1) at n = 0.
class FnSequence {
  public:
    FnSequence(Lambda lambda, CriticalSign sign, LiftKind lift)
        : lambda_(std::move(lambda)), sign_(sign), lift_(lift) {}

    const Lambda& lambda() const { return lambda_; }
    CriticalSign sign() const { return sign_; }
    LiftKind lift() const { return lift_; }
    int depth() const { return static_cast<int>(entries_.size()); }

    const FnEntry& entry(int n) const {
        if (n < 1 || n > depth()) throw DomainError("FnSequence index out of range");
        return entries_[static_cast<std::size_t>(n - 1)];
    }

    void append(FnEntry e) { entries_.push_back(std::move(e)); }

  private:
    Lambda lambda_;
    CriticalSign sign_;
    LiftKind lift_;
    std::vector<FnEntry> entries_;
};

namespace detail {

struct RawStep {
    BinaryForm a;
    BinaryForm b;
};

// One application of the integral homogeneous lift to a degree-d pair.
// lambda = p/q in lowest terms enters as p on the first coordinate and q on
// the second, which is the integral form of the map (p*t2*z1*z2) / (q*(...)).
inline RawStep apply_lift(const Lambda& lambda, LiftKind lift, const BinaryForm& z1,
                          const BinaryForm& z2) {
    const Int p = lambda.numerator(), q = lambda.denominator();
    const BinaryForm z1z1 = z1 * z1;
    const BinaryForm z1z2 = z1 * z2;
    const BinaryForm z2z2 = z2 * z2;
    const BinaryForm first = (lift == LiftKind::standard ? z1z2 : z1z1);
    RawStep out;
    out.a = p * first.times_t2_power(1);
    out.b = q * (z1z1.times_t2_power(1) + z1z2.times_t1_power(1) + z2z2.times_t2_power(1));
    return out;
}

}  // namespace detail

// Continues an existing sequence up to n_max, iterating the lift from the
// last stored pair (or the constant pair (s, 1) for an empty sequence) and
// removing the joint integer content and the polynomial gcd at each step.
inline void extend_Fn(FnSequence& seq, int n_max, const BuildLimits& limits = {}) {
    if (n_max < 1) throw DomainError("extend_Fn requires n_max >= 1");
    const CriticalSign s = seq.sign();
    BinaryForm a, b;
    int prev_degree = 0;
    if (seq.depth() == 0) {
        a = BinaryForm::constant(Int(sign_value(s)));
        b = BinaryForm::constant(Int(1));
    } else {
        const FnEntry& last = seq.entry(seq.depth());
        a = last.pair.a;
        b = last.pair.b;
        prev_degree = last.degree;
    }
    for (int n = seq.depth() + 1; n <= n_max; ++n) {
        auto raw = detail::apply_lift(seq.lambda(), seq.lift(), a, b);
        if (raw.a.is_zero() || raw.b.is_zero())
            throw DomainError("degenerate lift iterate at n=" + std::to_string(n));
        const Int joint = gcd(upoly::content(raw.a.coeffs()), upoly::content(raw.b.coeffs()));
        BinaryForm pa = form_divide_exact(raw.a, BinaryForm::constant(joint));
        BinaryForm pb = form_divide_exact(raw.b, BinaryForm::constant(joint));
        BinaryForm g = form_gcd(pa, pb);
        if (g.degree() > 0) {
            pa = form_divide_exact(pa, g);
            pb = form_divide_exact(pb, g);
        }
        const int d = pa.degree();
        if (d != 2 * prev_degree + 1 - g.degree())
            throw DomainError("degree law violated in build_Fn");
        if (pa.coefficient_bits() + pb.coefficient_bits() > limits.max_total_coefficient_bits)
            throw Error("build_Fn memory guard exceeded at n=" + std::to_string(n));
        FnEntry entry{BinaryFormPair{pa, pb}, std::move(g), joint, d};
        seq.append(std::move(entry));
        a = std::move(pa);
        b = std::move(pb);
        prev_degree = d;
    }
}

inline FnSequence build_Fn(const Lambda& lambda, CriticalSign s, int n_max,
                           LiftKind lift = LiftKind::standard, const BuildLimits& limits = {}) {
    FnSequence seq(lambda, s, lift);
    extend_Fn(seq, n_max, limits);
    return seq;
}

// P_n(t): primitive part of A_n(t,1) - s*B_n(t,1); its roots are the
// parameters where the marked critical point has period dividing n.
inline upoly::Poly periodic_parameter_poly(const FnSequence& seq, int n) {
    const FnEntry& e = seq.entry(n);
    upoly::Poly a = e.pair.a.dehomogenized();
    upoly::Poly bs = e.pair.b.dehomogenized();
    if (sign_value(seq.sign()) < 0)
        for (auto& c : bs) c = -c;
    upoly::Poly p = upoly::sub(a, bs);
    if (upoly::is_zero(p)) throw DomainError("periodic parameter polynomial vanished");
    return upoly::primitive(p);
}

inline upoly::Poly periodic_parameter_poly(const Lambda& lambda, CriticalSign s, int n,
                                           LiftKind lift = LiftKind::standard) {
    return periodic_parameter_poly(build_Fn(lambda, s, n, lift), n);
}

}  // namespace heightlab
