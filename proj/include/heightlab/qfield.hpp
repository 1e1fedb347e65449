// Places of Q, absolute values, the product formula, and the Weil height.
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <string>
#include <vector>

#include "heightlab/bigint.hpp"
#include "heightlab/primes.hpp"

namespace heightlab {

// A place of Q: the archimedean absolute value or a p-adic one.
// N_v = 1 throughout (base field is Q); the field is kept so formulas
// involving N_v read the same as for general number fields.
class Place {
  public:
    static Place archimedean() { return Place(Int(0), true); }

    static Place finite(Int p) {
        if (!is_prime(p)) throw DomainError("finite place requires a prime, got " + p.str());
        return Place(std::move(p), false);
    }

    bool is_archimedean() const { return arch_; }
    const Int& prime() const {
        if (arch_) throw DomainError("archimedean place has no prime");
        return p_;
    }
    int multiplicity() const { return 1; }  // N_v

    double log_prime() const { return arch_ ? 0.0 : log_abs_int(p_); }

    std::string label() const { return arch_ ? "inf" : p_.str(); }

    friend bool operator==(const Place& a, const Place& b) {
        return a.arch_ == b.arch_ && a.p_ == b.p_;
    }
    // Archimedean place sorts first, finite places by prime.
    friend bool operator<(const Place& a, const Place& b) {
        if (a.arch_ != b.arch_) return a.arch_;
        return a.p_ < b.p_;
    }

  private:
    Place(Int p, bool arch) : p_(std::move(p)), arch_(arch) {}
    Int p_;
    bool arch_;
};

// log|x|_v on the natural-log scale. At a finite place the value is an
// integer multiple of log p; the multiple is carried exactly.
struct LogAbs {
    double value = 0.0;
    bool finite_place = false;
    long logp_multiple = 0;  // value == logp_multiple * log p when finite_place
};

inline long padic_val(const Rational& x, const Int& p) {
    if (x == 0) throw DomainError("valuation of zero undefined");
    return valuation(num(x), p) - valuation(den(x), p);
}

inline LogAbs log_abs(const Rational& x, const Place& v) {
    if (x == 0) throw DomainError("log-absolute-value of zero undefined");
    if (v.is_archimedean()) return {log_abs_rational(x), false, 0};
    const long m = -padic_val(x, v.prime());
    return {static_cast<double>(m) * v.log_prime(), true, m};
}

// The places where |x|_v != 1, plus the archimedean place.
inline std::vector<Place> support_places(const Rational& x) {
    if (x == 0) throw DomainError("support of zero undefined");
    std::vector<Place> out;
    out.push_back(Place::archimedean());
    auto fac = factorize(num(x) * den(x));  // primes of num and den (coprime)
    for (const auto& [p, e] : fac) out.push_back(Place::finite(p));
    return out;
}

// Exact bookkeeping for sum_v log|x|_v = 0: per support prime p the
// archimedean term contributes +v_p(x)*log p (because |x|_inf factors as
// the product of p^{v_p(x)}) and the place p contributes -v_p(x)*log p.
// Residual coefficients are integers and must all be zero; zero-ness is
// established by exact integer reconstruction, no floating point involved.
struct ProductFormulaResidual {
    struct Term {
        Int prime;
        long exponent;        // v_p(x)
        long residual_coeff;  // coefficient of log p in the residual
    };
    std::vector<Term> terms;
    bool reconstruction_ok = false;  // |num| and den match prod p^e exactly

    bool is_zero() const {
        if (!reconstruction_ok) return false;
        return std::all_of(terms.begin(), terms.end(),
                           [](const Term& t) { return t.residual_coeff == 0; });
    }
};

inline ProductFormulaResidual product_formula_residual(const Rational& x) {
    if (x == 0) throw DomainError("product formula undefined at zero");
    ProductFormulaResidual out;
    const Int n = abs(num(x)), d = den(x);
    Int n_rec = 1, d_rec = 1;
    auto fac_n = factorize(n), fac_d = factorize(d);
    std::map<Int, long> exps;
    for (const auto& [p, e] : fac_n) exps[p] += e;
    for (const auto& [p, e] : fac_d) exps[p] -= e;
    for (const auto& [p, e] : exps) {
        // independent re-derivation of v_p(x) at each support prime
        const long v = padic_val(x, p);
        out.terms.push_back({p, e, e - v});  // arch side +e, finite side -v
        if (e > 0) n_rec *= pow(p, static_cast<unsigned>(e));
        if (e < 0) d_rec *= pow(p, static_cast<unsigned>(-e));
    }
    out.reconstruction_ok = (n_rec == n && d_rec == d);
    return out;
}

// Logarithmic Weil height: h(a/b) = log max(|a|, |b|) in lowest terms.
inline double weil_height(const Rational& x) {
    if (x == 0) return 0.0;
    const Int a = abs(num(x));
    const Int& b = den(x);
    return log_abs_int(a >= b ? a : b);
}

}  // namespace heightlab
