// Equidistribution experiments: small-height parameter sets S_n, discrete
// energies against the bifurcation potentials, and point-cloud exports.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "heightlab/bigint.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/roots.hpp"

namespace heightlab {

// Roots of the level-n periodic-parameter polynomial, certified. The set is
// Galois-invariant by construction (roots of one integer polynomial).
template <class Real>
ParameterSet build_Sn(PotentialLab<Real>& lab, CriticalSign s, int n, double eps_root,
                      std::uint64_t seed) {
    if (n < 1) throw DomainError("build_Sn requires n >= 1");
    const upoly::Poly poly = periodic_parameter_poly(lab.fn(s), n);
    const CertifiedRoots roots = complex_roots(poly, eps_root, seed);
    ParameterSet out;
    out.level = n;
    out.defining_poly = poly;
    out.roots = roots.roots;
    out.residuals = roots.residuals;
    out.residual_bound = roots.max_relative_residual;
    out.lambda = lab.lambda().value();
    out.sign = s;
    return out;
}

struct EnergyTrend {
    std::vector<int> levels;
    std::vector<double> energies;
    std::string place = "inf";
    CriticalSign sign = CriticalSign::plus;
};

// Archimedean ([S_n],[S_n]) energies against the normalized mu^s potential
// for each level in n_list (ascending, within the symbolic depth).
template <class Real>
EnergyTrend energy_trend(PotentialLab<Real>& lab, CriticalSign s, const std::vector<int>& n_list,
                         double eps_root, std::uint64_t seed) {
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw DomainError("energy_trend expects ascending levels");
    EnergyTrend out;
    out.sign = s;
    const MeasureSpec spec = MeasureSpec::pure(s);
    for (int n : n_list) {
        if (n > lab.options().n_max) throw DomainError("energy level exceeds symbolic depth");
        const ParameterSet sn = build_Sn(lab, s, n, eps_root, seed);
        std::vector<std::complex<Real>> pts;
        pts.reserve(sn.roots.size());
        for (const auto& z : sn.roots)
            pts.emplace_back(static_cast<Real>(z.real()), static_cast<Real>(z.imag()));
        out.levels.push_back(n);
        out.energies.push_back(static_cast<double>(lab.pair_energy_arch(pts, spec)));
    }
    return out;
}

// CSV "re,im,residual", one row per root, lexicographic by (re, im).
inline void pointcloud_export(const ParameterSet& s, std::ostream& os) {
    os << "re,im,residual\n";
    char buf[96];
    for (std::size_t i = 0; i < s.roots.size(); ++i) {
        const double resid = i < s.residuals.size() ? s.residuals[i] : s.residual_bound;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.3g\n", s.roots[i].real(), s.roots[i].imag(),
                      resid);
        os << buf;
    }
}

inline void pointcloud_export(const ParameterSet& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    pointcloud_export(s, os);
    if (!os.good()) throw Error("write failure on '" + path + "'");
}

// Mass per annulus around `center`: entry i covers [bins[i-1], bins[i])
// with bins[0] measured from 0; the last annulus absorbs everything from
// bins.back() outward, so the masses always sum to 1.
struct AnnulusHistogram {
    std::vector<double> bin_edges;
    std::vector<double> masses;
};

inline AnnulusHistogram annulus_histogram(const ParameterSet& s, std::complex<double> center,
                                          const std::vector<double>& bins) {
    if (bins.empty() || !std::is_sorted(bins.begin(), bins.end()))
        throw DomainError("annulus bins must be nonempty and ascending");
    if (s.roots.empty()) throw DomainError("annulus histogram of empty set");
    AnnulusHistogram out;
    out.bin_edges = bins;
    out.masses.assign(bins.size(), 0.0);
    const double unit = 1.0 / static_cast<double>(s.roots.size());
    for (const auto& z : s.roots) {
        const double r = std::abs(z - center);
        std::size_t idx = bins.size() - 1;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (r < bins[i]) {
                idx = i;
                break;
            }
        }
        out.masses[idx] += unit;
    }
    return out;
}

}  // namespace heightlab
