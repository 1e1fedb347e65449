// Simultaneous (Aberth-Ehrlich) polynomial root finding with residual
// certification, deterministic under a fixed seed. Iteration runs in
// GMP floating point with the working precision sized from the coefficient
// bit-length and the root radius bound: the periodic-parameter polynomials
// have coefficients of hundreds of bits, far beyond what double-precision
// evaluation can resolve near the root cloud.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "heightlab/bigint.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/upoly.hpp"

namespace heightlab {

struct RootFindingError : ConvergenceError {
    RootFindingError(const std::string& what, std::vector<std::complex<double>> partial_roots)
        : ConvergenceError(what), partial(std::move(partial_roots)) {}
    std::vector<std::complex<double>> partial;
};

namespace detail {

// Deterministic uniform double in [0,1) independent of library distributions.
class SplitMix {
  public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

using BigFloat = boost::multiprecision::mpf_float;  // dynamic default precision

struct BigComplex {
    BigFloat re;
    BigFloat im;

    BigComplex() : re(0), im(0) {}
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
        BigFloat d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    BigFloat abs2() const { return re * re + im * im; }
    BigFloat abs() const { return sqrt(abs2()); }
    bool is_zero() const { return re == 0 && im == 0; }
    std::complex<double> to_double() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }
};

struct BigHorner {
    BigComplex value;
    BigFloat magnitude;  // sum |c_k| |z|^k for a residual denominator
};

inline BigHorner big_horner(const std::vector<BigFloat>& c, const BigComplex& z) {
    BigComplex acc;
    BigFloat mag(0);
    const BigFloat az = z.abs();
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
        acc = acc * z;
        acc.re += c[static_cast<std::size_t>(i)];
        mag = mag * az + abs(c[static_cast<std::size_t>(i)]);
    }
    return {acc, mag};
}

}  // namespace detail

struct CertifiedRoots {
    std::vector<std::complex<double>> roots;  // sorted by (re, im)
    std::vector<double> residuals;            // per root, same order
    double max_relative_residual = 0.0;       // |P(z)| / (||P|| max(1,|z|)^deg)
};

// All complex roots of an integer polynomial (deg >= 1) with certified
// relative residuals <= eps_root. Restarts from perturbed configurations on
// stagnation; throws RootFindingError (carrying the partial list) if the
// residual target is still unmet after the configured restarts.
inline CertifiedRoots complex_roots(const upoly::Poly& poly_in, double eps_root,
                                    std::uint64_t seed = 1, int max_restarts = 4,
                                    int max_sweeps = 400) {
    upoly::Poly poly = poly_in;
    upoly::normalize(poly);
    const int deg_total = upoly::deg(poly);
    if (deg_total < 1) throw DomainError("root finding requires degree >= 1");
    if (eps_root <= 0) throw DomainError("eps_root must be positive");

    std::vector<std::complex<double>> roots;
    std::size_t shift = 0;  // exact zero roots: strip the power of t
    while (shift < poly.size() && poly[shift] == 0) ++shift;
    for (std::size_t i = 0; i < shift; ++i) roots.emplace_back(0.0, 0.0);
    upoly::Poly reduced(poly.begin() + static_cast<std::ptrdiff_t>(shift), poly.end());
    const int d = upoly::deg(reduced);

    // Working precision: coefficient size plus degree * log2(radius bound),
    // with margin; evaluation noise then sits far below the residual target.
    long max_bits = 1, lc_bits = 1;
    for (std::size_t i = 0; i < reduced.size(); ++i)
        if (reduced[i] != 0) max_bits = std::max(max_bits, static_cast<long>(msb(abs(reduced[i])) + 1));
    lc_bits = static_cast<long>(msb(abs(reduced.back())) + 1);
    double radius_log2 = 0.0;
    for (int k = 0; k < d; ++k) {
        if (reduced[static_cast<std::size_t>(k)] == 0) continue;
        const double diff = static_cast<double>(msb(abs(reduced[static_cast<std::size_t>(k)])) + 1 - lc_bits);
        radius_log2 = std::max(radius_log2, diff / static_cast<double>(d - k) + 1.0);
    }
    radius_log2 = std::max(radius_log2, 1.0);
    const long prec_bits = max_bits + static_cast<long>(static_cast<double>(d) * radius_log2) + 160;
    const unsigned prec_digits = static_cast<unsigned>(static_cast<double>(prec_bits) / 3.32) + 4;
    const unsigned saved_precision = detail::BigFloat::default_precision();
    detail::BigFloat::default_precision(prec_digits);

    double worst_final = 0.0;
    std::vector<double> final_residuals;
    try {
        if (d >= 1) {
            using detail::BigComplex;
            using detail::BigFloat;
            std::vector<BigFloat> c(reduced.size());
            for (std::size_t i = 0; i < reduced.size(); ++i) c[i] = BigFloat(reduced[i]);
            std::vector<BigFloat> dc(static_cast<std::size_t>(d));
            for (int i = 1; i <= d; ++i)
                dc[static_cast<std::size_t>(i - 1)] = c[static_cast<std::size_t>(i)] * i;
            BigFloat cnorm(0);
            for (const auto& x : c) cnorm = std::max(cnorm, BigFloat(abs(x)));

            const double radius = std::ldexp(1.0, static_cast<int>(std::min(60.0, radius_log2)));
            detail::SplitMix rng(seed * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
            std::vector<BigComplex> z(static_cast<std::size_t>(d));
            std::vector<double> resid(static_cast<std::size_t>(d), 0.0);

            auto relative_residual = [&](const BigComplex& zi) {
                const auto h = detail::big_horner(c, zi);
                BigFloat denom = cnorm;
                const BigFloat az = zi.abs();
                if (az > 1) {
                    BigFloat p(1);
                    for (int i = 0; i < d; ++i) p *= az;
                    denom *= p;
                }
                return static_cast<double>(h.value.abs() / denom);
            };

            bool certified = false;
            for (int attempt = 0; attempt <= max_restarts && !certified; ++attempt) {
                const double angle0 = 2.0 * M_PI * rng.next_unit();
                const double spread = 1.0 + 0.25 * rng.next_unit();
                for (int i = 0; i < d; ++i) {
                    const double ang = angle0 + 2.0 * M_PI * (i + 0.5) / d + 0.05 * rng.next_unit();
                    const double r = 0.5 * radius * spread * (1.0 + 0.1 * ((i * 7919) % 13) / 13.0);
                    z[static_cast<std::size_t>(i)] =
                        BigComplex(BigFloat(r * std::cos(ang)), BigFloat(r * std::sin(ang)));
                }
                const BigFloat step_target = pow(BigFloat(0.5), static_cast<int>(prec_bits / 2));
                for (int sweep = 0; sweep < max_sweeps; ++sweep) {
                    BigFloat max_rel_step(0);
                    for (int i = 0; i < d; ++i) {
                        auto& zi = z[static_cast<std::size_t>(i)];
                        const BigComplex pv = detail::big_horner(c, zi).value;
                        if (pv.is_zero()) continue;
                        BigComplex dv = detail::big_horner(dc, zi).value;
                        if (dv.is_zero()) dv = BigComplex(BigFloat(1e-300), BigFloat(0));
                        const BigComplex newton = pv / dv;
                        BigComplex srep;
                        for (int j = 0; j < d; ++j) {
                            if (j == i) continue;
                            const BigComplex diff = zi - z[static_cast<std::size_t>(j)];
                            if (!diff.is_zero())
                                srep = srep + BigComplex(BigFloat(1), BigFloat(0)) / diff;
                        }
                        const BigComplex denom =
                            BigComplex(BigFloat(1), BigFloat(0)) - newton * srep;
                        BigComplex w = denom.is_zero() ? newton : newton / denom;
                        // limit wild steps so one bad correction cannot eject a root
                        const BigFloat wm = w.abs();
                        BigFloat zm = zi.abs();
                        if (zm < 1) zm = 1;
                        const BigFloat cap = BigFloat(0.5 * radius) + zm;
                        if (wm > cap) {
                            const BigFloat sc = cap / wm;
                            w.re *= sc;
                            w.im *= sc;
                        }
                        zi = zi - w;
                        BigFloat rel = w.abs();
                        BigFloat zscale = zi.abs();
                        if (zscale < 1) zscale = 1;
                        rel /= zscale;
                        if (rel > max_rel_step) max_rel_step = rel;
                    }
                    if (max_rel_step < step_target && sweep > 2) break;
                }
                double worst = 0.0;
                for (int i = 0; i < d; ++i) {
                    resid[static_cast<std::size_t>(i)] = relative_residual(z[static_cast<std::size_t>(i)]);
                    worst = std::max(worst, resid[static_cast<std::size_t>(i)]);
                }
                certified = worst <= eps_root;
                worst_final = worst;
            }
            if (!certified) {
                std::vector<std::complex<double>> partial = roots;
                for (const auto& zi : z) partial.push_back(zi.to_double());
                detail::BigFloat::default_precision(saved_precision);
                throw RootFindingError("root finder failed to certify residuals", std::move(partial));
            }
            std::vector<std::size_t> order(z.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::vector<std::complex<double>> zd(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) zd[i] = z[i].to_double();
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (zd[a].real() != zd[b].real()) return zd[a].real() < zd[b].real();
                return zd[a].imag() < zd[b].imag();
            });
            for (std::size_t i : order) {
                roots.push_back(zd[i]);
                final_residuals.push_back(resid[i]);
            }
        }
    } catch (...) {
        detail::BigFloat::default_precision(saved_precision);
        throw;
    }
    detail::BigFloat::default_precision(saved_precision);

    // zero roots precede the solved ones and are exact
    std::vector<std::complex<double>> ordered;
    std::vector<double> ordered_resid;
    ordered.reserve(roots.size());
    for (std::size_t i = 0; i < shift; ++i) {
        ordered.emplace_back(0.0, 0.0);
        ordered_resid.push_back(0.0);
    }
    for (std::size_t i = shift; i < roots.size(); ++i) {
        ordered.push_back(roots[i]);
        ordered_resid.push_back(final_residuals[i - shift]);
    }
    // final ordering across both groups
    std::vector<std::size_t> order(ordered.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ordered[a].real() != ordered[b].real()) return ordered[a].real() < ordered[b].real();
        return ordered[a].imag() < ordered[b].imag();
    });
    CertifiedRoots out;
    for (std::size_t i : order) {
        out.roots.push_back(ordered[i]);
        out.residuals.push_back(ordered_resid[i]);
        out.max_relative_residual = std::max(out.max_relative_residual, ordered_resid[i]);
    }
    return out;
}

// Certified root data for one periodic-parameter polynomial level.
struct ParameterSet {
    int level = 0;                            // n
    upoly::Poly defining_poly;                // P_n, primitive integer polynomial
    std::vector<std::complex<double>> roots;  // with multiplicity, sorted (re, im)
    std::vector<double> residuals;            // per root
    double residual_bound = 0.0;              // certified relative residual
    Rational lambda;
    CriticalSign sign = CriticalSign::plus;

    std::size_t size() const { return roots.size(); }
};

}  // namespace heightlab
