// Local potential theory for the Per1(lambda) family: escape rates G_v,
// the gamma_v(lambda) series, capacities via resultants, radii scans,
// Arakelov-Green pairings, energies and weighted measure combinations.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heightlab/bigint.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/polyforms.hpp"
#include "heightlab/primes.hpp"
#include "heightlab/qfield.hpp"
#include "heightlab/roots.hpp"
#include "heightlab/upoly.hpp"

namespace heightlab {

enum class ProvenanceTag { series_tail, stabilized_valuation, extrapolated, exact };

inline const char* tag_label(ProvenanceTag t) {
    switch (t) {
        case ProvenanceTag::series_tail: return "series-tail";
        case ProvenanceTag::stabilized_valuation: return "stabilized-valuation";
        case ProvenanceTag::extrapolated: return "extrapolated";
        case ProvenanceTag::exact: return "exact";
    }
    return "?";
}

// A real estimate with an explicit error radius. Certified values carry a
// provenance tag; heuristic ones are flagged by certified = false.
struct PotentialValue {
    double value = 0.0;
    double error = 0.0;
    ProvenanceTag tag = ProvenanceTag::extrapolated;
    bool certified = false;
    std::string note;
};

// Weights over the two marked critical points; rational, summing to 1.
struct MeasureSpec {
    Rational weight_plus;
    Rational weight_minus;

    static MeasureSpec pure(CriticalSign s) {
        return s == CriticalSign::plus ? MeasureSpec{Rational(1), Rational(0)}
                                       : MeasureSpec{Rational(0), Rational(1)};
    }
    static MeasureSpec average() { return {make_rational(Int(1), Int(2)), make_rational(Int(1), Int(2))}; }
    static MeasureSpec of(Rational wp, Rational wm) {
        if (wp < 0 || wm < 0 || wp + wm != 1)
            throw DomainError("measure weights must be nonnegative and sum to 1");
        return {std::move(wp), std::move(wm)};
    }

    Rational weight(CriticalSign s) const {
        return s == CriticalSign::plus ? weight_plus : weight_minus;
    }
};

struct RadiiReport {
    Place place = Place::archimedean();
    double r_in = 0.0;
    double r_out = 0.0;
    PotentialValue capacity;
    double grid_note = 0.0;  // largest neighbour-to-neighbour jump seen on the grid
};

// log-plus clamps ||F_n|| at 1 before taking logs (the printed form of the
// escape limit); log-plain drops the clamp, which is what the identity
// G_v(1,0) = gamma_v requires at finite places. Both are first-class.
enum class EscapeMode { log_plus, log_plain };

inline std::string escape_label(EscapeMode m) {
    return m == EscapeMode::log_plus ? "log-plus" : "log-plain";
}

namespace detail {

template <class Real>
Real log_abs_int_r(const Int& x) {
    if (x == 0) throw DomainError("log of zero");
    auto [m, e] = to_double_2exp(x);
    return std::log(std::fabs(static_cast<Real>(m))) + static_cast<Real>(e) * static_cast<Real>(M_LN2);
}

// Heuristic stabilization error from the last consecutive differences of a
// convergent sequence: geometric extrapolation of the remaining tail.
template <class Real>
PotentialValue stabilized_value(const std::vector<Real>& vals, ProvenanceTag tag) {
    PotentialValue pv;
    const std::size_t n = vals.size();
    if (n == 0) throw DomainError("empty sequence");
    pv.value = static_cast<double>(vals[n - 1]);
    pv.tag = tag;
    pv.certified = false;
    const double floor_err = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(pv.value));
    if (n == 1) {
        pv.error = std::fabs(pv.value) + floor_err;
        return pv;
    }
    const double d1 = std::fabs(static_cast<double>(vals[n - 1] - vals[n - 2]));
    double ratio = 0.5;
    if (n >= 3) {
        const double d0 = std::fabs(static_cast<double>(vals[n - 2] - vals[n - 3]));
        if (d0 > 0.0 && d1 > 0.0) ratio = std::clamp(d1 / d0, 0.25, 0.9);
    }
    pv.error = 1.5 * d1 * ratio / (1.0 - ratio) + floor_err;
    return pv;
}

// sum_{i>N} 2^-i = 2^-N ; sum_{i>N} i 2^-i = (N+2) 2^-N ;
// sum_{i>N} 2^-i log(i+1) <= 2^-N (log(N+2) + 1/(N+2))  (concavity of log).
inline double gamma_tail_bound(int n, double h_lambda) {
    const double p = std::ldexp(1.0, -n);  // 2^-N
    return 0.5 * (p * (std::log(static_cast<double>(n) + 2.0) + 1.0 / (static_cast<double>(n) + 2.0)) +
                  (static_cast<double>(n) + 2.0) * p * h_lambda);
}

}  // namespace detail

// gamma_v(lambda) = 1/2 sum_{i>=1} 2^-i log|1 + lambda + ... + lambda^i|_v.
// Finite places split into three exact regimes:
//   |lambda|_v < 1: every partial sum is a v-adic unit, the value is 0;
//   |lambda|_v > 1: ultrametrically v(sigma_i) = i*v(lambda), the series
//                   telescopes to log|lambda|_v exactly;
//   |lambda|_v = 1: term-by-term exact valuations with a certified
//                   envelope tail bound.
template <class Real = double>
PotentialValue gamma_series(const Lambda& lambda, const Place& v, double tol,
                            int min_terms = 130, int max_terms = 4096) {
    if (tol <= 0) throw DomainError("gamma_series requires tol > 0");
    const double h_lambda = weil_height(lambda.value());
    if (!v.is_archimedean()) {
        const long vl = padic_val(lambda.value(), v.prime());
        if (vl > 0) return {0.0, 0.0, ProvenanceTag::exact, true, ""};
        if (vl < 0) {
            const double val = static_cast<double>(-vl) * v.log_prime();
            return {val, 0.0, ProvenanceTag::exact, true, ""};
        }
    }
    Real acc = 0;
    Rational sigma = 1;  // 1 + lambda + ... + lambda^i, extended iteratively
    Rational power = 1;
    Real term_scale = Real(0.25);  // (1/2) * 2^-i at i = 1
    int i = 0;
    double tail = std::numeric_limits<double>::infinity();
    while (i < max_terms) {
        ++i;
        power *= lambda.value();
        sigma += power;
        if (sigma != 0) {  // sigma = 0 would mean lambda is a root of unity
            if (v.is_archimedean()) {
                acc += term_scale * (detail::log_abs_int_r<Real>(num(sigma)) -
                                     detail::log_abs_int_r<Real>(den(sigma)));
            } else {
                const long m = padic_val(sigma, v.prime());
                if (m != 0) acc -= term_scale * static_cast<Real>(m) * static_cast<Real>(v.log_prime());
            }
        }
        term_scale *= Real(0.5);
        if (i >= min_terms) {
            tail = detail::gamma_tail_bound(i, h_lambda);
            if (tail < tol) break;
        }
    }
    if (!(tail < tol)) throw ConvergenceError("gamma_series tail bound did not reach tol");
    return {static_cast<double>(acc), tail, ProvenanceTag::series_tail, true, ""};
}

// A lift of a point of P^1 as a coprime integer pair.
struct IntLift {
    Int u;
    Int w;
};

inline IntLift coprime_lift(const Rational& t) { return {num(t), den(t)}; }

template <class Real = double>
class PotentialLab {
  public:
    struct Options {
        LiftKind lift = LiftKind::standard;
        EscapeMode escape = EscapeMode::log_plain;
        int n_max = 8;
    };

    PotentialLab(Lambda lambda, Options opt = {}) : lambda_(std::move(lambda)), opt_(opt) {
        if (opt_.n_max < 1 || opt_.n_max > 10) throw DomainError("n_max must lie in [1,10]");
    }

    const Lambda& lambda() const { return lambda_; }
    const Options& options() const { return opt_; }

    // Installs a sequence built elsewhere (e.g. loaded from the cache).
    void adopt_sequence(FnSequence seq) {
        if (!(seq.lambda().value() == lambda_.value()) || seq.lift() != opt_.lift)
            throw DomainError("adopted FnSequence does not match the lab configuration");
        slot(seq.sign()) = std::move(seq);
    }

    const FnSequence& fn(CriticalSign s) {
        auto& cell = slot(s);
        if (!cell || cell->depth() < opt_.n_max)
            cell = build_Fn(lambda_, s, opt_.n_max, opt_.lift);
        return *cell;
    }

    // --- escape rates -----------------------------------------------------

    // Raw escape values log||F_n(point)||_v / d_n for n = 1..n_max at an
    // exact rational point (clamped per the configured mode).
    std::vector<Real> escape_values(CriticalSign s, const Place& v, const Rational& t1,
                                    const Rational& t2) {
        if (t1 == 0 && t2 == 0) throw DomainError("escape rate at (0,0)");
        const FnSequence& seq = fn(s);
        std::vector<Real> out;
        out.reserve(static_cast<std::size_t>(opt_.n_max));
        for (int n = 1; n <= opt_.n_max; ++n) {
            const LogAbs l = eval_lognorm(seq.entry(n).pair, t1, t2, v);
            Real raw;
            if (v.is_archimedean()) {
                raw = static_cast<Real>(l.value);
            } else {
                raw = static_cast<Real>(l.logp_multiple) * static_cast<Real>(v.log_prime());
            }
            if (opt_.escape == EscapeMode::log_plus && raw < Real(0)) raw = Real(0);
            out.push_back(raw / static_cast<Real>(seq.entry(n).degree));
        }
        return out;
    }

    PotentialValue escape_rate(CriticalSign s, const Place& v, const Rational& t1,
                               const Rational& t2) {
        const auto vals = escape_values(s, v, t1, t2);
        PotentialValue pv = detail::stabilized_value(vals, v.is_archimedean()
                                                               ? ProvenanceTag::extrapolated
                                                               : ProvenanceTag::stabilized_valuation);
        if (!v.is_archimedean()) {
            // valuations are quantized: one grain log p / d_n is the honest
            // floor on how far the limit can sit from a stalled sequence
            const double grain = v.log_prime() / static_cast<double>(fn(s).entry(opt_.n_max).degree);
            pv.error = std::max(pv.error, grain);
        }
        return pv;
    }

    // Archimedean escape values at a complex point for every depth, through
    // the renormalized value recurrence F_n(pt) = Lift(F_{n-1}(pt)) divided
    // by the recorded content and gcd values. Coefficient-wise evaluation of
    // the deep forms would cancel catastrophically near the zero locus (the
    // coefficients dwarf the values there); the recurrence stays conditioned
    // because each step renormalizes to unit max-norm.
    std::vector<Real> escape_values_arch(CriticalSign s, const std::complex<Real>& t1,
                                         const std::complex<Real>& t2) {
        std::vector<Real> out = raw_escape_values_arch(s, t1, t2);
        if (opt_.escape == EscapeMode::log_plus)
            for (auto& v : out)
                if (v < Real(0)) v = Real(0);  // sign of log||F_n|| survives the degree division
        return out;
    }

    PotentialValue escape_rate_arch(CriticalSign s, const std::complex<Real>& t1,
                                    const std::complex<Real>& t2) {
        return detail::stabilized_value(escape_values_arch(s, t1, t2), ProvenanceTag::extrapolated);
    }

  private:
    static double edge_coeff_lognorm(const BinaryFormPair& pair, int k) {
        const Int& a = pair.a.coeff(k);
        const Int& b = pair.b.coeff(k);
        if (a == 0 && b == 0) throw DomainError("pair coefficients vanish jointly");
        if (a == 0) return log_abs_int(b);
        if (b == 0) return log_abs_int(a);
        return std::max(log_abs_int(a), log_abs_int(b));
    }

    // Scaled complex Horner for a single (small) form: value = acc * e^log_off.
    static std::pair<std::complex<Real>, Real> eval_form_scaled(const BinaryForm& f,
                                                                const std::complex<Real>& t1,
                                                                const std::complex<Real>& t2) {
        const int d = f.degree();
        long e_max = std::numeric_limits<long>::min();
        for (int k = 0; k <= d; ++k)
            if (f.coeff(k) != 0) e_max = std::max(e_max, to_double_2exp(f.coeff(k)).second);
        std::complex<Real> acc(0, 0);
        // bases are bounded by the unit-normalized point, Horner in t1 slots
        for (int k = d; k >= 0; --k) {
            acc *= t1;
            const auto [m, e] = to_double_2exp(f.coeff(k));
            if (m != 0.0) {
                std::complex<Real> term(static_cast<Real>(std::ldexp(m, static_cast<int>(std::max<long>(e - e_max, -16000)))), 0);
                for (int i = 0; i < d - k; ++i) term *= t2;
                acc += term;
            }
        }
        return {acc, static_cast<Real>(e_max) * static_cast<Real>(M_LN2)};
    }

    // log||F_n(pt)|| / d_n for n = 1..n_max via the renormalized recurrence.
    std::vector<Real> raw_escape_values_arch(CriticalSign s, std::complex<Real> t1,
                                             std::complex<Real> t2) {
        const FnSequence& seq = fn(s);
        const int n_max = opt_.n_max;
        std::vector<Real> out;
        out.reserve(static_cast<std::size_t>(n_max));
        const Real sp = std::max(std::abs(t1), std::abs(t2));
        if (sp == Real(0)) throw DomainError("escape rate at (0,0)");
        const Real log_sp = std::log(sp);
        t1 /= sp;
        t2 /= sp;
        // points on the coordinate axes evaluate through the extreme
        // coefficients exactly (the recurrence degenerates to 0/0 there)
        if (t1 == std::complex<Real>(0, 0) || t2 == std::complex<Real>(0, 0)) {
            const bool on_t2_axis = (t1 == std::complex<Real>(0, 0));  // point (0, t2)
            for (int n = 1; n <= n_max; ++n) {
                const int k = on_t2_axis ? 0 : seq.entry(n).degree;
                const double l = edge_coeff_lognorm(seq.entry(n).pair, k);
                out.push_back(static_cast<Real>(l) / static_cast<Real>(seq.entry(n).degree) + log_sp);
            }
            return out;
        }
        const Real lam_num = static_cast<Real>(static_cast<double>(lambda_.numerator()));
        const Real lam_den = static_cast<Real>(static_cast<double>(lambda_.denominator()));
        const bool literal = (opt_.lift == LiftKind::paper_literal);
        std::complex<Real> za, zb;
        Real logscale = 0;
        {  // depth 1 directly from the (small) first pair
            const auto [va, la] = eval_form_scaled(seq.entry(1).pair.a, t1, t2);
            const auto [vb, lb] = eval_form_scaled(seq.entry(1).pair.b, t1, t2);
            // bring both to a common log offset
            const Real common = std::max(la, lb);
            za = va * std::exp(la - common);
            zb = vb * std::exp(lb - common);
            const Real norm = std::max(std::abs(za), std::abs(zb));
            if (norm == Real(0)) throw DomainError("pair vanished during evaluation");
            za /= norm;
            zb /= norm;
            logscale = common + std::log(norm);
            out.push_back(logscale / static_cast<Real>(seq.entry(1).degree) + log_sp);
        }
        for (int n = 2; n <= n_max; ++n) {
            const FnEntry& entry = seq.entry(n);
            const std::complex<Real> first = literal ? za * za : za * zb;
            std::complex<Real> ra = lam_num * t2 * first;
            std::complex<Real> rb = lam_den * (t2 * za * za + t1 * za * zb + t2 * zb * zb);
            Real logpending = Real(2) * logscale;
            if (entry.removed_gcd.degree() > 0) {
                const auto [gv, gl] = eval_form_scaled(entry.removed_gcd, t1, t2);
                if (gv == std::complex<Real>(0, 0))
                    throw DomainError("gcd factor vanishes at the evaluation point");
                ra /= gv;
                rb /= gv;
                logpending -= gl;
            }
            logpending -= detail::log_abs_int_r<Real>(entry.removed_content);
            const Real norm = std::max(std::abs(ra), std::abs(rb));
            if (norm == Real(0)) throw DomainError("pair vanished during evaluation");
            za = ra / norm;
            zb = rb / norm;
            logscale = logpending + std::log(norm);
            out.push_back(logscale / static_cast<Real>(entry.degree) + log_sp);
        }
        return out;
    }

  public:

    // Exact escape value at depth n at a finite place, as the rational
    // coefficient of log p. Clamping follows the configured mode.
    Rational escape_logp_coeff(CriticalSign s, const Place& v, const Rational& t1,
                               const Rational& t2, int n) {
        if (v.is_archimedean()) throw DomainError("finite place required");
        const FnSequence& seq = fn(s);
        const LogAbs l = eval_lognorm(seq.entry(n).pair, t1, t2, v);
        Rational coeff = make_rational(Int(l.logp_multiple), Int(seq.entry(n).degree));
        if (opt_.escape == EscapeMode::log_plus && coeff < 0) coeff = 0;
        return coeff;
    }

    // --- capacities ---------------------------------------------------------

    const std::vector<Int>& resultants(CriticalSign s) {
        auto& cell = (s == CriticalSign::plus) ? res_plus_ : res_minus_;
        const FnSequence& seq = fn(s);
        if (static_cast<int>(cell.size()) < opt_.n_max) {
            cell.clear();
            for (int n = 1; n <= opt_.n_max; ++n) {
                Int r = resultant(seq.entry(n).pair);
                if (r == 0) throw DomainError("degenerate iterate: zero resultant at n=" + std::to_string(n));
                cell.push_back(std::move(r));
            }
        }
        return cell;
    }

    // log cap_n at depth n: -log|Res F_n|_v / d_n^2.
    Real log_capacity(CriticalSign s, const Place& v, int n) {
        const Int& r = resultants(s)[static_cast<std::size_t>(n - 1)];
        const Real d = static_cast<Real>(fn(s).entry(n).degree);
        if (v.is_archimedean()) return -detail::log_abs_int_r<Real>(r) / (d * d);
        const long m = valuation(r, v.prime());
        return static_cast<Real>(m) * static_cast<Real>(v.log_prime()) / (d * d);
    }

    Rational capacity_logp_coeff(CriticalSign s, const Place& v, int n) {
        if (v.is_archimedean()) throw DomainError("finite place required");
        const Int& r = resultants(s)[static_cast<std::size_t>(n - 1)];
        const long m = valuation(r, v.prime());
        const Int d(fn(s).entry(n).degree);
        return make_rational(Int(m), d * d);
    }

    // Full capacity sequence c_n = |Res F_n|_v^(-1/d_n^2).
    std::vector<Real> capacity_values(CriticalSign s, const Place& v) {
        std::vector<Real> out;
        for (int n = 1; n <= opt_.n_max; ++n) out.push_back(std::exp(log_capacity(s, v, n)));
        return out;
    }

    PotentialValue capacity_estimate(CriticalSign s, const Place& v) {
        const auto vals = capacity_values(s, v);
        return detail::stabilized_value(vals, v.is_archimedean()
                                                  ? ProvenanceTag::extrapolated
                                                  : ProvenanceTag::stabilized_valuation);
    }

    // --- normalized potentials ---------------------------------------------

    // G_{mu_v} = G_v + (1/2) log cap(M_v), both sides taken at the same
    // depth so their stabilization errors stay aligned.
    Real normalized_value_arch(CriticalSign s, const std::complex<Real>& t1,
                               const std::complex<Real>& t2, int n) {
        const auto vals = escape_values_arch(s, t1, t2);
        return vals[static_cast<std::size_t>(n - 1)] +
               Real(0.5) * log_capacity(s, Place::archimedean(), n);
    }

    PotentialValue normalized_potential_arch(CriticalSign s, const std::complex<Real>& t1,
                                             const std::complex<Real>& t2) {
        std::vector<Real> vals = escape_values_arch(s, t1, t2);
        for (int n = 1; n <= opt_.n_max; ++n)
            vals[static_cast<std::size_t>(n - 1)] +=
                Real(0.5) * log_capacity(s, Place::archimedean(), n);
        return detail::stabilized_value(vals, ProvenanceTag::extrapolated);
    }

    // Exact normalized coefficient of log p at depth n.
    Rational normalized_logp_coeff(CriticalSign s, const Place& v, const Rational& t1,
                                   const Rational& t2, int n) {
        return escape_logp_coeff(s, v, t1, t2, n) + make_rational(Int(1), Int(2)) * capacity_logp_coeff(s, v, n);
    }

    PotentialValue normalized_potential(CriticalSign s, const Place& v, const Rational& t1,
                                        const Rational& t2) {
        if (v.is_archimedean()) {
            // rational points evaluate exactly, no recurrence needed
            std::vector<Real> vals = escape_values(s, v, t1, t2);
            for (int n = 1; n <= opt_.n_max; ++n)
                vals[static_cast<std::size_t>(n - 1)] += Real(0.5) * log_capacity(s, v, n);
            return detail::stabilized_value(vals, ProvenanceTag::extrapolated);
        }
        std::vector<Real> vals;
        for (int n = 1; n <= opt_.n_max; ++n) {
            const Rational c = normalized_logp_coeff(s, v, t1, t2, n);
            vals.push_back(static_cast<Real>(static_cast<double>(c)) * static_cast<Real>(v.log_prime()));
        }
        return detail::stabilized_value(vals, ProvenanceTag::stabilized_valuation);
    }

    // Weighted combination sum_s w_s G_{mu_v^s}; not renormalized.
    PotentialValue combined_potential(const MeasureSpec& spec, const Place& v, const Rational& t1,
                                      const Rational& t2) {
        PotentialValue out;
        out.tag = v.is_archimedean() ? ProvenanceTag::extrapolated : ProvenanceTag::stabilized_valuation;
        for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
            const double w = static_cast<double>(spec.weight(s));
            if (w == 0.0) continue;
            const PotentialValue pv = normalized_potential(s, v, t1, t2);
            out.value += w * pv.value;
            out.error += w * pv.error;
        }
        return out;
    }

    // --- radii ---------------------------------------------------------------

    struct RadiiScan {
        RadiiReport normalized;  // radii of mu_v (capacity 1 by construction)
        RadiiReport raw;         // radii of M_v together with cap(M_v)
        int grid_size = 0;
    };

    // Scans the boundary pieces {|t1|=1, |t2|<=1} and {|t1|<=1, |t2|=1} of
    // the unit max-norm sphere; by homogeneity a 2d (modulus x argument)
    // grid of the second coordinate suffices on each piece.
    RadiiScan radii_arch(CriticalSign s, int grid_size) {
        if (grid_size < 64) throw DomainError("radii_arch requires grid_size >= 64");
        const int n = opt_.n_max;
        const Real half_logcap = Real(0.5) * log_capacity(s, Place::archimedean(), n);
        Real gmin = std::numeric_limits<Real>::infinity();
        Real gmax = -std::numeric_limits<Real>::infinity();
        Real max_jump = 0;
        for (int piece = 0; piece < 2; ++piece) {
            std::vector<Real> prev_row;
            for (int k = 0; k <= grid_size; ++k) {
                const Real rho = static_cast<Real>(k) / static_cast<Real>(grid_size);
                std::vector<Real> row(static_cast<std::size_t>(grid_size));
                for (int j = 0; j < grid_size; ++j) {
                    const Real phi = Real(2) * static_cast<Real>(M_PI) * static_cast<Real>(j) /
                                     static_cast<Real>(grid_size);
                    const std::complex<Real> w = std::polar(rho, phi);
                    const std::complex<Real> one(1, 0);
                    const Real raw = piece == 0 ? escape_values_arch(s, one, w).back()
                                                : escape_values_arch(s, w, one).back();
                    row[static_cast<std::size_t>(j)] = raw;
                    gmin = std::min(gmin, raw);
                    gmax = std::max(gmax, raw);
                    if (j > 0)
                        max_jump = std::max(max_jump, std::fabs(static_cast<double>(
                                                          row[static_cast<std::size_t>(j)] -
                                                          row[static_cast<std::size_t>(j - 1)])));
                }
                if (!prev_row.empty()) {
                    for (int j = 0; j < grid_size; ++j)
                        max_jump = std::max(max_jump, std::fabs(static_cast<double>(
                                                          row[static_cast<std::size_t>(j)] -
                                                          prev_row[static_cast<std::size_t>(j)])));
                }
                prev_row = std::move(row);
            }
        }
        RadiiScan scan;
        scan.grid_size = grid_size;
        const double note = static_cast<double>(max_jump);
        // raw set M_v: G_v <= 0
        scan.raw.place = Place::archimedean();
        scan.raw.r_in = std::exp(-static_cast<double>(gmax));
        scan.raw.r_out = std::exp(-static_cast<double>(gmin));
        scan.raw.capacity = capacity_estimate(s, Place::archimedean());
        scan.raw.grid_note = note;
        // normalized measure mu_v: shift by (1/2) log cap
        scan.normalized.place = Place::archimedean();
        scan.normalized.r_in = std::exp(-static_cast<double>(gmax + half_logcap));
        scan.normalized.r_out = std::exp(-static_cast<double>(gmin + half_logcap));
        PotentialValue capn;
        capn.value = 1.0;
        capn.error = scan.raw.capacity.error / std::max(1e-300, scan.raw.capacity.value);
        capn.tag = ProvenanceTag::extrapolated;
        scan.normalized.capacity = capn;
        scan.normalized.grid_note = note;
        return scan;
    }

    // Finite-place bracket: integrality gives r_in(M_p) >= 1, and the
    // Bezout combination behind the resultant gives G_p >= log|Res|_p / d_n
    // on the unit sphere, hence r_out(M_p) <= p^(v_p(Res)/d_n).
    RadiiReport radii_finite(CriticalSign s, const Place& v) {
        if (v.is_archimedean()) throw DomainError("finite place required");
        const int n = opt_.n_max;
        const Int& r = resultants(s)[static_cast<std::size_t>(n - 1)];
        const long m = valuation(r, v.prime());
        const double dn = static_cast<double>(fn(s).entry(n).degree);
        RadiiReport rep;
        rep.place = v;
        rep.r_in = 1.0;
        rep.r_out = std::exp(static_cast<double>(m) * v.log_prime() / dn);
        rep.capacity = capacity_estimate(s, v);
        rep.grid_note = 0.0;
        return rep;
    }

    // --- Arakelov-Green pairing and energies ---------------------------------

    // g(x, y) = -log|x ^ y|_v + G(x) + G(y) with G the spec-weighted
    // normalized potential; +infinity on the diagonal.
    Real green_arch(const MeasureSpec& spec, const std::complex<Real>& x1,
                    const std::complex<Real>& x2, const std::complex<Real>& y1,
                    const std::complex<Real>& y2) {
        const std::complex<Real> wedge = x1 * y2 - y1 * x2;
        if (wedge == std::complex<Real>(0, 0)) return std::numeric_limits<Real>::infinity();
        Real g = -std::log(std::abs(wedge));
        for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
            const Real w = static_cast<Real>(static_cast<double>(spec.weight(s)));
            if (w == Real(0)) continue;
            g += w * (normalized_value_arch(s, x1, x2, opt_.n_max) +
                      normalized_value_arch(s, y1, y2, opt_.n_max));
        }
        return g;
    }

    // Exact rational coefficient of log p; lift-invariance and symmetry are
    // exact identities of this coefficient.
    std::optional<Rational> green_logp_coeff(const MeasureSpec& spec, const Place& v,
                                             const Rational& x1, const Rational& x2,
                                             const Rational& y1, const Rational& y2) {
        if (v.is_archimedean()) throw DomainError("finite place required");
        const Rational wedge = x1 * y2 - y1 * x2;
        if (wedge == 0) return std::nullopt;  // diagonal: +infinity
        Rational coeff = Rational(padic_val(wedge, v.prime()));  // -log|w|_p = v_p(w) log p
        for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
            const Rational w = spec.weight(s);
            if (w == 0) continue;
            coeff += w * (normalized_logp_coeff(s, v, x1, x2, opt_.n_max) +
                          normalized_logp_coeff(s, v, y1, y2, opt_.n_max));
        }
        return coeff;
    }

    // Rational-lift entry point at any place; +infinity marks the diagonal.
    double green(const MeasureSpec& spec, const Place& v, const Rational& x1, const Rational& x2,
                 const Rational& y1, const Rational& y2) {
        if ((x1 == 0 && x2 == 0) || (y1 == 0 && y2 == 0))
            throw DomainError("green function requires nonzero lifts");
        if (v.is_archimedean()) {
            return static_cast<double>(green_arch(
                spec, std::complex<Real>(static_cast<Real>(x1), 0),
                std::complex<Real>(static_cast<Real>(x2), 0),
                std::complex<Real>(static_cast<Real>(y1), 0),
                std::complex<Real>(static_cast<Real>(y2), 0)));
        }
        const auto coeff = green_logp_coeff(spec, v, x1, x2, y1, y2);
        if (!coeff) return std::numeric_limits<double>::infinity();
        return static_cast<double>(*coeff) * v.log_prime();
    }

    // ([S],[S]) = (1/(2|S|^2)) sum_{x != y} g(x,y) over complex points with
    // lifts (z, 1); the per-point potentials are hoisted out of the double
    // sum. Summation order is fixed by index for reproducibility.
    Real pair_energy_arch(const std::vector<std::complex<Real>>& pts, const MeasureSpec& spec) {
        const std::size_t m = pts.size();
        if (m == 0) throw DomainError("pair energy of empty multiset");
        if (m == 1) return Real(0);
        std::vector<Real> gpot(m, Real(0));
        for (std::size_t i = 0; i < m; ++i) {
            for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
                const Real w = static_cast<Real>(static_cast<double>(spec.weight(s)));
                if (w == Real(0)) continue;
                gpot[i] += w * normalized_value_arch(s, pts[i], std::complex<Real>(1, 0), opt_.n_max);
            }
        }
        Real cross = 0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const std::complex<Real> wedge = pts[i] - pts[j];
                cross += -std::log(std::abs(wedge));  // both (i,j) and (j,i)
            }
        }
        Real pot = 0;
        for (std::size_t i = 0; i < m; ++i) pot += gpot[i];
        const Real mm = static_cast<Real>(m);
        return (Real(2) * cross + Real(2) * (mm - 1) * pot) / (Real(2) * mm * mm);
    }

    // Exact-lift variant over rational points at any place.
    double pair_energy(const std::vector<Rational>& pts, const MeasureSpec& spec, const Place& v) {
        const std::size_t m = pts.size();
        if (m == 0) throw DomainError("pair energy of empty multiset");
        if (m == 1) return 0.0;
        if (v.is_archimedean()) {
            std::vector<std::complex<Real>> cpts;
            cpts.reserve(m);
            for (const auto& q : pts) cpts.emplace_back(static_cast<Real>(q), Real(0));
            return static_cast<double>(pair_energy_arch(cpts, spec));
        }
        Rational total = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                auto c = green_logp_coeff(spec, v, pts[i], Rational(1), pts[j], Rational(1));
                if (!c) return std::numeric_limits<double>::infinity();
                total += *c;
            }
        total /= Int(2) * Int(m) * Int(m);
        return static_cast<double>(total) * v.log_prime();
    }

    // --- L estimate ------------------------------------------------------------

    struct LEstimate {
        PotentialValue value;       // weighted discrete pairing, jackknife error
        int points_used = 0;
        std::vector<double> leave_one_out;  // the jackknife replicates
    };

    // L_v = (1/2) iint sum_i w_i g_{mu_i,v} dmu dmu estimated over a proxy
    // point cloud: sum_s w_s ([S],[S])_{g_s}, with a delete-one jackknife
    // error. Archimedean-only evidence; tagged as such.
    LEstimate l_estimate(const MeasureSpec& spec, const ParameterSet& proxy, int samples,
                         std::uint64_t seed) {
        if (proxy.roots.empty()) throw DomainError("empty proxy parameter set");
        std::vector<std::complex<Real>> pts;
        pts.reserve(proxy.roots.size());
        for (const auto& z : proxy.roots)
            pts.emplace_back(static_cast<Real>(z.real()), static_cast<Real>(z.imag()));
        if (samples > 0 && samples < static_cast<int>(pts.size())) {
            // deterministic seeded subsample, index order preserved
            detail::SplitMix rng(seed ^ 0xa5a5a5a5deadbeefULL);
            std::vector<std::size_t> idx(pts.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            for (std::size_t i = idx.size() - 1; i > 0; --i)
                std::swap(idx[i], idx[rng.next_u64() % (i + 1)]);
            idx.resize(static_cast<std::size_t>(samples));
            std::sort(idx.begin(), idx.end());
            std::vector<std::complex<Real>> sub;
            sub.reserve(idx.size());
            for (auto i : idx) sub.push_back(pts[i]);
            pts = std::move(sub);
        }
        const std::size_t m = pts.size();
        if (m < 3) throw DomainError("L estimate needs at least 3 proxy points");
        // per-point spec-weighted potentials and the pair kernel row sums
        std::vector<Real> gpot(m, Real(0));
        for (std::size_t i = 0; i < m; ++i)
            for (CriticalSign s : {CriticalSign::plus, CriticalSign::minus}) {
                const Real w = static_cast<Real>(static_cast<double>(spec.weight(s)));
                if (w == Real(0)) continue;
                gpot[i] += w * normalized_value_arch(s, pts[i], std::complex<Real>(1, 0), opt_.n_max);
            }
        std::vector<Real> row(m, Real(0));  // sum_j != i of g(i,j)
        Real total = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const Real k = -std::log(std::abs(pts[i] - pts[j])) + gpot[i] + gpot[j];
                row[i] += k;
                row[j] += k;
                total += Real(2) * k;
            }
        const Real mm = static_cast<Real>(m);
        const Real pairing = total / (Real(2) * mm * mm);
        // delete-one replicates
        std::vector<double> loo(m);
        const Real m1 = mm - 1;
        for (std::size_t i = 0; i < m; ++i)
            loo[i] = static_cast<double>((total - Real(2) * row[i]) / (Real(2) * m1 * m1));
        double mean = 0;
        for (double x : loo) mean += x;
        mean /= static_cast<double>(m);
        double var = 0;
        for (double x : loo) var += (x - mean) * (x - mean);
        const double se = std::sqrt(var * (static_cast<double>(m) - 1.0) / static_cast<double>(m));
        LEstimate out;
        out.value.value = static_cast<double>(pairing);
        out.value.error = se;
        out.value.tag = ProvenanceTag::extrapolated;
        out.value.certified = false;
        out.value.note = "archimedean-only lower-bound evidence";
        out.points_used = static_cast<int>(m);
        out.leave_one_out = std::move(loo);
        return out;
    }

  private:
    std::optional<FnSequence>& slot(CriticalSign s) {
        return s == CriticalSign::plus ? fn_plus_ : fn_minus_;
    }

    Lambda lambda_;
    Options opt_;
    std::optional<FnSequence> fn_plus_;
    std::optional<FnSequence> fn_minus_;
    std::vector<Int> res_plus_;
    std::vector<Int> res_minus_;
};

}  // namespace heightlab
