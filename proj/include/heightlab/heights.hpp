// Canonical heights: Call-Silverman by direct iteration and by local
// decomposition, quasi-adelic heights with place-truncated sums and tail
// bounds, the L relation, PCF scans, and the Weil-height sandwich.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "heightlab/bigint.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/polyforms.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/primes.hpp"
#include "heightlab/qfield.hpp"

namespace heightlab {

struct HeightReport {
    Rational t;
    std::string method;
    std::vector<std::pair<Place, PotentialValue>> places;
    int prime_bound = 0;  // P; 0 when the decomposition is complete
    double tail = 0.0;
    PotentialValue total;
};

// hat h^s(t) = lim 2^-n h(f_t^n(s*1)). Exact zero (certified) on cycle
// detection; an orbit through a pole continues projectively through
// infinity to the fixed point 0, so it is preperiodic as well.
inline PotentialValue callsilverman_direct(const Lambda& lambda, const Rational& t,
                                           CriticalSign s, int n) {
    if (n < 4) throw DomainError("callsilverman_direct requires n >= 4");
    const OrbitReport orbit =
        critical_orbit(lambda, t, s, n, std::numeric_limits<double>::infinity());
    if (orbit.status != OrbitReport::Status::budget_exhausted)
        return {0.0, 0.0, ProvenanceTag::exact, true, ""};
    const auto height_at = [&](int k) {
        return std::ldexp(weil_height(orbit.points[static_cast<std::size_t>(k)].z), -k);
    };
    PotentialValue pv;
    pv.value = height_at(n);
    pv.error = std::fabs(pv.value - height_at(n - 1));
    pv.tag = ProvenanceTag::extrapolated;
    pv.certified = false;
    return pv;
}

namespace detail {

// Integral degree-2 lift of f_t in the orbit coordinates (z1, z2), joint
// content removed: (a w z1 z2, b w z1^2 + b u z1 z2 + b w z2^2) for
// lambda = a/b, t = u/w in lowest terms.
struct OrbitLift {
    BinaryFormPair pair;  // variables are (z1, z2)
    Int res;              // resultant, nonzero
};

inline OrbitLift orbit_lift(const Lambda& lambda, const Rational& t) {
    const Int a = lambda.numerator(), b = lambda.denominator();
    const Int u = num(t), w = den(t);
    BinaryForm n(std::vector<Int>{Int(0), a * w, Int(0)});
    BinaryForm d(std::vector<Int>{b * w, b * u, b * w});
    const Int joint = gcd(upoly::content(n.coeffs()), upoly::content(d.coeffs()));
    if (joint != 1) {
        n = form_divide_exact(n, BinaryForm::constant(joint));
        d = form_divide_exact(d, BinaryForm::constant(joint));
    }
    BinaryFormPair pair{std::move(n), std::move(d)};
    Int res = resultant(pair);
    if (res == 0) throw DomainError("degenerate parameter: zero resultant lift");
    return {std::move(pair), std::move(res)};
}

inline Int minor3(const std::array<std::array<Int, 4>, 4>& m, int skip_row, int skip_col) {
    std::array<Int, 9> e;
    int idx = 0;
    for (int i = 0; i < 4; ++i) {
        if (i == skip_row) continue;
        for (int j = 0; j < 4; ++j) {
            if (j == skip_col) continue;
            e[static_cast<std::size_t>(idx++)] = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
           e[2] * (e[3] * e[7] - e[4] * e[6]);
}

// Certified lower bound for max(|N(z)|, |D(z)|) on the unit max-norm
// sphere: cofactor rows of the Sylvester adjugate give integer forms with
// u*N + v*D = Res * z_i^3, so max >= |Res| / (sum of cofactor magnitudes).
inline double sphere_floor_log(const OrbitLift& lift) {
    std::array<std::array<Int, 4>, 4> s{};
    const BinaryForm& n = lift.pair.a;
    const BinaryForm& d = lift.pair.b;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= 2; ++j) {
            s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + j)] = n.coeff(2 - j);
            s[static_cast<std::size_t>(2 + i)][static_cast<std::size_t>(i + j)] = d.coeff(2 - j);
        }
    Int worst = 0;
    for (int target : {0, 3}) {  // rows of adj(S) for z1^3 and z2^3
        Int sum = 0;
        for (int j = 0; j < 4; ++j) sum += abs(minor3(s, j, target));
        worst = std::max(worst, sum);
    }
    return log_abs_int(lift.res) - log_abs_int(worst);
}

}  // namespace detail

// hat h^s(t) as a sum of local escape rates of the integral lift: good
// places vanish for the coprime critical-point lift (s, 1); the finitely
// many bad places (infinity and p | Res) are summed with certified tails.
inline HeightReport callsilverman_local(const Lambda& lambda, const Rational& t, CriticalSign s,
                                        int steps = 60) {
    const auto lift = detail::orbit_lift(lambda, t);
    HeightReport rep;
    rep.t = t;
    rep.method = "callsilverman-local";
    rep.prime_bound = 0;
    rep.tail = 0.0;

    // archimedean escape by renormalized iteration, with a certified
    // envelope |log||Psi(u)||| <= C on the unit sphere
    {
        const double c_up = [&] {
            Int sn = 0, sd = 0;
            for (int k = 0; k <= 2; ++k) {
                sn += abs(lift.pair.a.coeff(k));
                sd += abs(lift.pair.b.coeff(k));
            }
            return log_abs_int(sn > sd ? sn : sd);
        }();
        const double c_lo = detail::sphere_floor_log(lift);
        const double envelope = std::max(std::fabs(c_up), std::fabs(c_lo));
        double u1 = static_cast<double>(sign_value(s)), u2 = 1.0;
        const double a0 = static_cast<double>(lift.pair.a.coeff(1));
        const double b0 = static_cast<double>(lift.pair.b.coeff(0));
        const double b1 = static_cast<double>(lift.pair.b.coeff(1));
        const double b2 = static_cast<double>(lift.pair.b.coeff(2));
        double g = 0.0;
        for (int j = 0; j < steps; ++j) {
            const double n1 = a0 * u1 * u2;
            const double n2 = b2 * u1 * u1 + b1 * u1 * u2 + b0 * u2 * u2;
            const double norm = std::max(std::fabs(n1), std::fabs(n2));
            g += std::ldexp(std::log(norm), -(j + 1));
            u1 = n1 / norm;
            u2 = n2 / norm;
        }
        PotentialValue pv;
        pv.value = g;
        pv.error = envelope * std::ldexp(1.0, -steps) + 1e-13 * (1.0 + std::fabs(g));
        pv.tag = ProvenanceTag::series_tail;
        pv.certified = true;
        rep.places.emplace_back(Place::archimedean(), pv);
    }

    // finite bad places: exact valuations of the renormalized iteration in
    // Z/p^K, K sized from the resultant valuation bound on each step drop
    for (const auto& [p, e] : factorize(lift.res)) {
        const Place v = Place::finite(p);
        const long vres = e;
        const long K = 66 * (vres + 1) + 8;
        const Int pk = pow(p, static_cast<unsigned>(K));
        Int z1(sign_value(s));
        if (z1 < 0) z1 += pk;
        Int z2(1);
        long precision = K;
        double acc = 0.0;  // sum m_j 2^-j, each m_j <= vres
        const Int ca = lift.pair.a.coeff(1);
        const Int cb0 = lift.pair.b.coeff(0), cb1 = lift.pair.b.coeff(1), cb2 = lift.pair.b.coeff(2);
        for (int j = 1; j <= steps; ++j) {
            Int n1 = ca * z1 % pk * z2 % pk;
            Int n2 = (cb2 * z1 % pk * z1 + cb1 * z1 % pk * z2 + cb0 * z2 % pk * z2) % pk;
            long v1 = (n1 == 0) ? precision : valuation(n1, p);
            long v2 = (n2 == 0) ? precision : valuation(n2, p);
            const long m = std::min(v1, v2);
            if (m > vres) throw DomainError("local height step exceeded the resultant bound");
            if (m > 0) {
                const Int pm = pow(p, static_cast<unsigned>(m));
                n1 /= pm;
                n2 /= pm;
                precision -= m;
                if (precision <= vres + 2) throw DomainError("local height precision exhausted");
            }
            acc += std::ldexp(static_cast<double>(m), -j);
            z1 = n1;
            z2 = n2;
        }
        PotentialValue pv;
        pv.value = -acc * v.log_prime();
        pv.error = static_cast<double>(vres) * std::ldexp(1.0, -steps + 1) * v.log_prime() +
                   1e-14 * (1.0 + std::fabs(pv.value));
        pv.tag = ProvenanceTag::series_tail;
        pv.certified = true;
        rep.places.emplace_back(v, pv);
    }

    PotentialValue total;
    total.tag = ProvenanceTag::series_tail;
    total.certified = true;
    for (const auto& [v, pv] : rep.places) {
        total.value += pv.value;
        total.error += pv.error;
    }
    rep.total = total;
    return rep;
}

namespace detail {

inline std::vector<Int> primes_up_to(int bound) {
    std::vector<Int> out;
    for (int p = 2; p <= bound; ++p)
        if (is_prime_u64(static_cast<std::uint64_t>(p))) out.emplace_back(p);
    return out;
}

// log of the prime-to-P part of |x| (the factors from primes > P).
inline double log_beyond(Int x, const std::vector<Int>& small_primes) {
    x = abs(x);
    if (x == 0) throw DomainError("log_beyond of zero");
    for (const auto& p : small_primes) {
        Int rest;
        remove_factor(x, p, rest);
        x = rest;
        if (x == 1) break;
    }
    return x == 1 ? 0.0 : log_abs_int(x);
}

}  // namespace detail

// hat h_{mu^s}(t) truncated at the prime bound P: the archimedean and
// p <= P normalized potentials of the coprime lift (num t, den t), plus a
// computable tail envelope. The capacity mass over all places cancels by
// the product formula on the exact resultant integers, so the envelope
// has two computable pieces: the prime-to-P part of gcd(A_n, B_n) (escape
// side) and of Res F_n (capacity side).
template <class Real>
HeightReport quasi_adelic_height(PotentialLab<Real>& lab, const Rational& t, CriticalSign s,
                                 int prime_bound) {
    if (prime_bound < 2) throw DomainError("prime bound must be >= 2");
    const int n_max = lab.options().n_max;
    const FnSequence& seq = lab.fn(s);
    const IntLift lift = coprime_lift(t);
    const Rational ru(lift.u), rw(lift.w);

    std::vector<Int> av(static_cast<std::size_t>(n_max) + 1), bv(static_cast<std::size_t>(n_max) + 1);
    for (int n = 1; n <= n_max; ++n) {
        av[static_cast<std::size_t>(n)] = num(eval_exact(seq.entry(n).pair.a, ru, rw));
        bv[static_cast<std::size_t>(n)] = num(eval_exact(seq.entry(n).pair.b, ru, rw));
        if (av[static_cast<std::size_t>(n)] == 0 && bv[static_cast<std::size_t>(n)] == 0)
            throw DomainError("lift vanishes along the sequence");
    }
    const auto& res = lab.resultants(s);
    const bool clamp = lab.options().escape == EscapeMode::log_plus;

    HeightReport rep;
    rep.t = t;
    rep.method = "quasi-adelic";
    rep.prime_bound = prime_bound;

    {  // archimedean contribution
        std::vector<Real> vals;
        for (int n = 1; n <= n_max; ++n) {
            const Int& a = av[static_cast<std::size_t>(n)];
            const Int& b = bv[static_cast<std::size_t>(n)];
            Real m;
            if (a == 0) m = detail::log_abs_int_r<Real>(b);
            else if (b == 0) m = detail::log_abs_int_r<Real>(a);
            else m = std::max(detail::log_abs_int_r<Real>(a), detail::log_abs_int_r<Real>(b));
            if (clamp && m < Real(0)) m = Real(0);
            const Real d = static_cast<Real>(seq.entry(n).degree);
            vals.push_back(m / d - detail::log_abs_int_r<Real>(res[static_cast<std::size_t>(n - 1)]) /
                                       (Real(2) * d * d));
        }
        rep.places.emplace_back(Place::archimedean(),
                                detail::stabilized_value(vals, ProvenanceTag::extrapolated));
    }

    const std::vector<Int> small = detail::primes_up_to(prime_bound);
    for (const auto& p : small) {
        const Place v = Place::finite(p);
        std::vector<Real> vals;
        bool nonzero = false;
        for (int n = 1; n <= n_max; ++n) {
            const Int& a = av[static_cast<std::size_t>(n)];
            const Int& b = bv[static_cast<std::size_t>(n)];
            long m;
            if (a == 0) m = -valuation(b, p);
            else if (b == 0) m = -valuation(a, p);
            else m = -std::min(valuation(a, p), valuation(b, p));
            Real raw = static_cast<Real>(m) * static_cast<Real>(v.log_prime());
            if (clamp && raw < Real(0)) raw = Real(0);
            const Real d = static_cast<Real>(seq.entry(n).degree);
            const long vr = valuation(res[static_cast<std::size_t>(n - 1)], p);
            const Real val = raw / d + static_cast<Real>(vr) * static_cast<Real>(v.log_prime()) /
                                           (Real(2) * d * d);
            if (val != Real(0)) nonzero = true;
            vals.push_back(val);
        }
        if (!nonzero) continue;  // exact zero at every computed depth
        rep.places.emplace_back(v, detail::stabilized_value(vals, ProvenanceTag::stabilized_valuation));
    }

    {  // tail envelope at depth n_max
        const Int& a = av[static_cast<std::size_t>(n_max)];
        const Int& b = bv[static_cast<std::size_t>(n_max)];
        const Int g = (a == 0) ? Int(abs(b)) : (b == 0 ? Int(abs(a)) : Int(gcd(a, b)));
        const double dn = static_cast<double>(seq.entry(n_max).degree);
        const double tail_escape = detail::log_beyond(g, small) / dn;
        const double tail_cap =
            0.5 * detail::log_beyond(res[static_cast<std::size_t>(n_max - 1)], small) / (dn * dn);
        rep.tail = tail_escape + tail_cap;
    }

    PotentialValue total;
    total.tag = ProvenanceTag::extrapolated;
    total.certified = false;
    for (const auto& [v, pv] : rep.places) {
        total.value += pv.value;
        total.error += pv.error;
    }
    total.error += rep.tail;
    rep.total = total;
    return rep;
}

// hat h_mu = w+ hat h_{mu+} + w- hat h_{mu-} - L.
template <class Real>
PotentialValue combined_height(PotentialLab<Real>& lab, const Rational& t, const MeasureSpec& spec,
                               int prime_bound, const PotentialValue& l_hat) {
    PotentialValue out;
    out.tag = ProvenanceTag::extrapolated;
    out.certified = false;
    for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
        const double w = static_cast<double>(spec.weight(s));
        if (w == 0.0) continue;
        const HeightReport rep = quasi_adelic_height(lab, t, s, prime_bound);
        out.value += w * rep.total.value;
        out.error += w * rep.total.error;
    }
    out.value -= l_hat.value;
    out.error += l_hat.error;
    return out;
}

enum class PcfStatus { pcf, not_pcf, unknown };

inline const char* pcf_label(PcfStatus s) {
    switch (s) {
        case PcfStatus::pcf: return "PCF";
        case PcfStatus::not_pcf: return "NotPCF";
        case PcfStatus::unknown: return "Unknown";
    }
    return "?";
}

// PCF exactly when both critical orbits are finite. A pole in the orbit
// ends in the fixed point 0 (pole -> infinity -> 0), hence preperiodic.
// NotPCF only on the certifying height-blowup filter; otherwise Unknown.
inline std::vector<std::pair<Rational, PcfStatus>> pcf_scan(const Lambda& lambda,
                                                            const std::vector<Rational>& grid,
                                                            int budget, double blowup_h0 = 8.0) {
    std::vector<std::pair<Rational, PcfStatus>> out;
    out.reserve(grid.size());
    for (const auto& t : grid) {
        bool all_finite = true;
        bool escaped = false;
        for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
            const OrbitReport rep = critical_orbit(lambda, t, s, budget, blowup_h0);
            if (rep.status == OrbitReport::Status::budget_exhausted) {
                all_finite = false;
                if (rep.height_blowup) escaped = true;
            }
        }
        out.emplace_back(t, all_finite ? PcfStatus::pcf
                                       : (escaped ? PcfStatus::not_pcf : PcfStatus::unknown));
    }
    return out;
}

struct SandwichReport {
    Rational t;
    double weil = 0.0;
    PotentialValue height;
    double defect = 0.0;  // h(t) - hat h_mu(t)
    double lower = 0.0;   // bracket from log prod r_in
    double upper = 0.0;   // bracket from log prod r_out
    double slack = 0.0;   // grid note + height error folded into the bracket
    bool holds = false;
};

// log prod r_in(mu_v) <= h(t) - hat h_mu(t) <= log prod r_out(mu_v).
// The finite-place radii are bracketed through the capacity sandwich; over
// all finite places together the capacity mass is exactly the resultant
// size, so the brackets close without a prime cutoff.
template <class Real>
SandwichReport sandwich_check(PotentialLab<Real>& lab, CriticalSign s, const Rational& t,
                              int prime_bound, int grid_size = 96) {
    SandwichReport rep;
    rep.t = t;
    rep.weil = weil_height(t);
    const HeightReport h = quasi_adelic_height(lab, t, s, prime_bound);
    rep.height = h.total;
    rep.defect = rep.weil - h.total.value;
    const auto scan = lab.radii_arch(s, grid_size);
    const int n_max = lab.options().n_max;
    const double dn = static_cast<double>(lab.fn(s).entry(n_max).degree);
    const double log_res =
        log_abs_int(lab.resultants(s)[static_cast<std::size_t>(n_max - 1)]);
    rep.lower = std::log(scan.normalized.r_in) - 0.5 * log_res / (dn * dn);
    rep.upper = std::log(scan.normalized.r_out) + log_res / dn;
    rep.slack = scan.normalized.grid_note + h.total.error + 1e-12;
    rep.holds = (rep.lower - rep.slack <= rep.defect) && (rep.defect <= rep.upper + rep.slack);
    return rep;
}

// Reduced rationals with max(|num|, den) <= bound, ordered by that height
// level and numerically within a level; includes 0 first.
inline std::vector<Rational> rationals_by_height(int bound) {
    std::vector<Rational> out;
    out.emplace_back(0);
    for (int m = 1; m <= bound; ++m) {
        std::vector<Rational> level;
        for (int a = -m; a <= m; ++a) {
            for (int b = 1; b <= m; ++b) {
                if (std::max(std::abs(a), b) != m) continue;
                if (std::gcd(std::abs(a), b) != 1) continue;
                if (a == 0) continue;  // 0 already listed
                level.push_back(make_rational(Int(a), Int(b)));
            }
        }
        std::sort(level.begin(), level.end());
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

struct FinitenessHit {
    Rational t;
    PotentialValue height;
};

// Enumerates rationals of bounded height and reports those whose combined
// height sits below -delta with the whole error budget on the wrong side.
template <class Real>
std::vector<FinitenessHit> finiteness_scan(PotentialLab<Real>& lab, const MeasureSpec& spec,
                                           double delta, int height_bound, int prime_bound,
                                           const PotentialValue& l_hat) {
    if (delta <= 0) throw DomainError("finiteness_scan requires delta > 0");
    std::vector<FinitenessHit> out;
    for (const auto& t : rationals_by_height(height_bound)) {
        const PotentialValue h = combined_height(lab, t, spec, prime_bound, l_hat);
        if (h.value + h.error < -delta) out.push_back({t, h});
    }
    return out;
}

}  // namespace heightlab
