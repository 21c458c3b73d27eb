#pragma once

// Coherence factors |M| <= 1 of shaped electron densities, multi-electron
// excitation totals with pairwise interference, bunched-arrival and
// PINEM-train superradiance, and comb-parameter optimization of |M|.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "kinematics.hpp"
#include "pinem.hpp"
#include "specfun.hpp"

namespace freebeam::coherence {

using kinematics::ElectronBeam;
using cplx = std::complex<double>;

struct CouplingSummary {
    double gamma0;      // incoherent single-electron excitation probability
    cplx q;             // coherent amplitude, |q|^2 <= gamma0
    std::string label;
};

struct CoherenceFactor {
    cplx m;       // coherence factor, |m| <= 1
    double omega; // rad/fs
};

// M = int dz e^{i omega z / v} rho(z) for a normalized density on a uniform
// grid.  The same quadrature verifies int rho dz = 1 to 1e-6.
inline CoherenceFactor coherence_M_profile(const std::vector<double>& z,
                                           const std::vector<double>& rho,
                                           double photon_energy_ev, const ElectronBeam& beam) {
    if (z.size() < 3 || rho.size() != z.size())
        throw contract_error("coherence_M_profile: need matching grids with >= 3 samples");
    if (!(photon_energy_ev > 0.0))
        throw domain_error("coherence_M_profile: photon energy must be > 0");
    double h = (z.back() - z.front()) / (double)(z.size() - 1);
    if (!(h > 0.0)) throw contract_error("coherence_M_profile: grid must be increasing");
    for (std::size_t i = 1; i < z.size(); ++i)
        if (std::abs(z[i] - z[i - 1] - h) > 1e-9 * h)
            throw contract_error("coherence_M_profile: grid must be uniform");
    for (double r : rho)
        if (r < 0.0) throw contract_error("coherence_M_profile: density must be nonnegative");
    cplx norm = pinem::detail::simpson_uniform(z.size(), h,
                                               [&](std::size_t i) { return cplx(rho[i], 0.0); });
    if (std::abs(norm.real() - 1.0) > 1e-6)
        throw contract_error("coherence_M_profile: density is not normalized to 1e-6");
    double w = photon_energy_ev / hbar_ev_fs;
    cplx m = pinem::detail::simpson_uniform(z.size(), h, [&](std::size_t i) {
        return rho[i] * std::exp(cplx(0.0, w * z[i] / beam.velocity));
    });
    return {m / norm.real(), w};
}

struct PinemCoherence {
    cplx m_direct;       // sum over sideband pairs
    double m_closed_abs; // |J_m(4|beta| sin(2 pi m d / z_T))|
    double omega;        // rad/fs
};

// Harmonic-m coherence factor of a PINEM comb after propagation d:
//   M_m = sum_l J_l(2|beta|) J_{l+m}(2|beta|) e^{4 pi i m l d / z_T}
// whose modulus closes to |J_m(4|beta| sin(2 pi m d / z_T))|.
inline PinemCoherence coherence_M_pinem(cplx beta, double d_nm, int m, double photon_energy_ev,
                                        const ElectronBeam& beam) {
    if (m < 0) throw contract_error("coherence_M_pinem: harmonic must be >= 0");
    if (!(photon_energy_ev > 0.0))
        throw domain_error("coherence_M_pinem: photon energy must be > 0");
    double zt = kinematics::talbot_distance(beam, photon_energy_ev);
    double b = std::abs(beta);
    int l_max = pinem::auto_l_max(beta);
    std::vector<double> j = specfun::bessel_j_sequence(l_max + m, 2.0 * b);
    auto jl = [&](long l) {
        double v = j[(std::size_t)std::labs(l)];
        return (l < 0 && (l & 1)) ? -v : v;
    };
    cplx acc(0.0, 0.0);
    for (long l = -l_max - m; l <= l_max; ++l)
        acc += jl(l) * jl(l + m) *
               std::exp(cplx(0.0, 4.0 * pi * (double)m * (double)l * d_nm / zt));
    double closed = std::abs(specfun::bessel_j(m, 4.0 * b * std::sin(2.0 * pi * m * d_nm / zt)));
    return {acc, closed, photon_energy_ev / hbar_ev_fs};
}

// Total excitation probability of one mode probed by several electrons,
// optionally seeded by an external coherent field amplitude:
//   Gamma = sum_j gamma_j + sum_{j != j'} Q_j Q_j'^* + |b|^2 + 2 sum_j Re{b^* Q_j}
inline double total_excitation_multi(const std::vector<CouplingSummary>& electrons,
                                     std::optional<cplx> field_amplitude = std::nullopt) {
    double total = 0.0;
    cplx qsum(0.0, 0.0);
    double q2sum = 0.0;
    for (const CouplingSummary& e : electrons) {
        if (e.gamma0 < 0.0)
            throw contract_error("total_excitation_multi: gamma0 must be nonnegative");
        if (std::norm(e.q) > e.gamma0 * (1.0 + 1e-12) + 1e-300)
            throw contract_error("total_excitation_multi: |Q|^2 exceeds gamma0");
        total += e.gamma0;
        qsum += e.q;
        q2sum += std::norm(e.q);
    }
    total += std::norm(qsum) - q2sum;
    if (field_amplitude) {
        cplx b = *field_amplitude;
        total += std::norm(b) + 2.0 * (std::conj(b) * qsum).real();
    }
    return total;
}

// N identical electrons with arrival positions z_j:
//   Gamma = N Gamma0 + |Q0|^2 (|sum_j e^{i omega z_j / v}|^2 - N)
inline double bunched_total(const std::vector<double>& z_nm, double gamma0, cplx q0,
                            double photon_energy_ev, const ElectronBeam& beam) {
    if (z_nm.empty()) throw contract_error("bunched_total: need at least one electron");
    if (gamma0 < 0.0) throw contract_error("bunched_total: gamma0 must be nonnegative");
    if (std::norm(q0) > gamma0 * (1.0 + 1e-12) + 1e-300)
        throw contract_error("bunched_total: |Q|^2 exceeds gamma0");
    if (!(photon_energy_ev > 0.0)) throw domain_error("bunched_total: photon energy must be > 0");
    double w = photon_energy_ev / hbar_ev_fs;
    cplx s(0.0, 0.0);
    for (double z : z_nm) s += std::exp(cplx(0.0, w * z / beam.velocity));
    double n = (double)z_nm.size();
    return n * gamma0 + std::norm(q0) * (std::norm(s) - n);
}

// N electrons compressed by the same PINEM comb, pairwise phases aligned:
//   Gamma = N Gamma0 + N (N - 1) |Q M|^2
inline double superradiant_pinem_total(long n, double gamma0, cplx q, cplx m) {
    if (n < 1) throw contract_error("superradiant_pinem_total: need N >= 1");
    if (gamma0 < 0.0) throw contract_error("superradiant_pinem_total: gamma0 must be nonnegative");
    if (std::norm(q) > gamma0 * (1.0 + 1e-12) + 1e-300)
        throw contract_error("superradiant_pinem_total: |Q|^2 exceeds gamma0");
    if (std::abs(m) > 1.0 + 1e-12)
        throw contract_error("superradiant_pinem_total: |M| exceeds 1");
    return (double)n * gamma0 + (double)n * ((double)n - 1.0) * std::norm(q * m);
}

struct OptimalComb {
    double beta_abs;
    double d_nm;
    double m2; // |M|^2 at the optimum
};

namespace detail {

inline double m2_comb(double b, double d, int m, double zt) {
    double x = 4.0 * b * std::sin(2.0 * pi * (double)m * d / zt);
    double jm = specfun::bessel_j(m, x);
    return jm * jm;
}

template <class F>
double golden_max(F&& f, double a, double b, double tol) {
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

// Maximize |M_m(beta, d)|^2 over a rectangle: coarse grid, alternating
// golden-section refinement per coordinate, then a downward bisection in
// beta so ties along the equal-value ridge resolve to the smallest |beta|.
inline OptimalComb optimize_M(int m, double photon_energy_ev, const ElectronBeam& beam,
                              double beta_lo, double beta_hi, double d_lo, double d_hi) {
    if (m < 1) throw contract_error("optimize_M: harmonic must be >= 1");
    if (!(photon_energy_ev > 0.0)) throw domain_error("optimize_M: photon energy must be > 0");
    if (!(beta_hi >= beta_lo) || beta_lo < 0.0 || !(d_hi >= d_lo) || d_lo < 0.0)
        throw contract_error("optimize_M: invalid search rectangle");
    double zt = kinematics::talbot_distance(beam, photon_energy_ev);
    const int nb = 121, nd = 121;
    double bb = beta_lo, bd = d_lo, best = -1.0;
    for (int i = 0; i < nb; ++i) {
        double b = beta_lo + (beta_hi - beta_lo) * (double)i / (nb - 1);
        for (int k = 0; k < nd; ++k) {
            double d = d_lo + (d_hi - d_lo) * (double)k / (nd - 1);
            double v = detail::m2_comb(b, d, m, zt);
            if (v > best) {
                best = v; bb = b; bd = d;
            }
        }
    }
    double hb = (beta_hi - beta_lo) / (nb - 1), hd = (d_hi - d_lo) / (nd - 1);
    double tol_b = std::max(1e-6 * std::max(beta_hi - beta_lo, 1.0), 1e-12);
    double tol_d = std::max(1e-6 * std::max(d_hi - d_lo, 1.0), 1e-12);
    for (int it = 0; it < 64; ++it) {
        double b0 = bb, d0 = bd;
        double lo = std::max(beta_lo, bb - hb), hi = std::min(beta_hi, bb + hb);
        bb = detail::golden_max([&](double b) { return detail::m2_comb(b, bd, m, zt); }, lo, hi,
                                tol_b);
        lo = std::max(d_lo, bd - hd); hi = std::min(d_hi, bd + hd);
        bd = detail::golden_max([&](double d) { return detail::m2_comb(bb, d, m, zt); }, lo, hi,
                                tol_d);
        if (std::abs(bb - b0) < tol_b && std::abs(bd - d0) < tol_d) break;
    }
    best = detail::m2_comb(bb, bd, m, zt);

    // smallest beta whose d-maximized value still attains the optimum
    auto inner_max = [&](double b, double& d_at) {
        int kb = 0;
        double vb = -1.0;
        const int nscan = 97;
        for (int k = 0; k < nscan; ++k) {
            double d = d_lo + (d_hi - d_lo) * (double)k / (nscan - 1);
            double v = detail::m2_comb(b, d, m, zt);
            if (v > vb) {
                vb = v;
                kb = k;
            }
        }
        double cell = (d_hi - d_lo) / (nscan - 1);
        double dk = d_lo + cell * kb;
        d_at = detail::golden_max(
            [&](double d) { return detail::m2_comb(b, d, m, zt); }, std::max(d_lo, dk - cell),
            std::min(d_hi, dk + cell), tol_d);
        return detail::m2_comb(b, d_at, m, zt);
    };
    double d_at = bd;
    if (inner_max(beta_lo, d_at) >= best - 1e-12) {
        bb = beta_lo;
    } else {
        double lo = beta_lo, hi = bb;
        while (hi - lo > tol_b) {
            double mid = 0.5 * (lo + hi);
            if (inner_max(mid, d_at) >= best - 1e-12) hi = mid;
            else lo = mid;
        }
        bb = hi;
    }
    best = inner_max(bb, d_at);
    return {bb, d_at, best};
}

} // namespace freebeam::coherence
