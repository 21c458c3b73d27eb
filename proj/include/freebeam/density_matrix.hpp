#pragma once

// Single-electron density matrix on a periodic grid spanning one comoving
// optical period l = 2 pi v / omega: PINEM phase imprint, spectral free
// propagation (Fourier mode l acquires phase -2 pi l^2 d / z_T), and grid
// diagnostics.

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "kinematics.hpp"
#include "pinem.hpp"
#include "specfun.hpp"

namespace freebeam::density_matrix {

using kinematics::ElectronBeam;
using cplx = std::complex<double>;

struct DensityMatrixGrid {
    std::size_t n;         // power of two
    double period;         // l = 2 pi v / omega, nm
    double photon_energy;  // eV
    ElectronBeam beam;
    std::vector<cplx> rho; // n*n, row-major; diagonal carries density per nm

    cplx& at(std::size_t i, std::size_t j) { return rho[i * n + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return rho[i * n + j]; }
    double z(std::size_t i) const { return period * (double)i / (double)n; }

    void validate() const {
        if (n < 2 || (n & (n - 1)) != 0)
            throw contract_error("DensityMatrixGrid: n must be a power of two >= 2");
        if (rho.size() != n * n) throw contract_error("DensityMatrixGrid: matrix size mismatch");
        double herm = 0.0, tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tr += at(i, i).real();
            for (std::size_t j = i; j < n; ++j)
                herm = std::max(herm, std::abs(at(i, j) - std::conj(at(j, i))));
        }
        if (herm > 1e-12) throw contract_error("DensityMatrixGrid: not Hermitian to 1e-12");
        if (std::abs(tr * period / (double)n - 1.0) > 1e-10)
            throw contract_error("DensityMatrixGrid: trace differs from 1 by more than 1e-10");
    }
};

inline DensityMatrixGrid pure_uniform(std::size_t n, double photon_energy_ev,
                                      const ElectronBeam& beam) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw contract_error("pure_uniform: n must be a power of two >= 2");
    if (!(photon_energy_ev > 0.0)) throw domain_error("pure_uniform: photon energy must be > 0");
    DensityMatrixGrid g;
    g.n = n;
    g.photon_energy = photon_energy_ev;
    g.beam = beam;
    g.period = 2.0 * pi * beam.velocity / (photon_energy_ev / hbar_ev_fs);
    g.rho.assign(n * n, cplx(1.0 / g.period, 0.0));
    return g;
}

// Pure state from wave-function samples on the period grid; normalization
// is imposed so that sum |psi|^2 l / n = 1.
inline DensityMatrixGrid from_wavefunction(const std::vector<cplx>& psi, double photon_energy_ev,
                                           const ElectronBeam& beam) {
    std::size_t n = psi.size();
    if (n < 2 || (n & (n - 1)) != 0)
        throw contract_error("from_wavefunction: n must be a power of two >= 2");
    if (!(photon_energy_ev > 0.0))
        throw domain_error("from_wavefunction: photon energy must be > 0");
    DensityMatrixGrid g;
    g.n = n;
    g.photon_energy = photon_energy_ev;
    g.beam = beam;
    g.period = 2.0 * pi * beam.velocity / (photon_energy_ev / hbar_ev_fs);
    double norm2 = 0.0;
    for (const cplx& a : psi) norm2 += std::norm(a);
    norm2 *= g.period / (double)n;
    if (!(norm2 > 0.0)) throw contract_error("from_wavefunction: zero wave function");
    double scale = 1.0 / norm2;
    g.rho.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.rho[i * n + j] = scale * psi[i] * std::conj(psi[j]);
    return g;
}

namespace detail {

inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = (inverse ? 2.0 : -2.0) * pi / (double)len;
        cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (cplx& x : a) x /= (double)n;
}

// Quadratic spectral phases e^{-2 pi i l^2 d / z_T} with the argument
// reduced mod 1 before scaling, so revivals at rational d / z_T stay exact.
inline std::vector<cplx> talbot_phases(std::size_t n, double ratio) {
    std::vector<cplx> ph(n);
    for (std::size_t m = 0; m < n; ++m) {
        long long l = (long long)m;
        if (m >= n / 2) l -= (long long)n;
        long double q = std::fmod((long double)(l * l) * (long double)ratio, 1.0L);
        ph[m] = std::polar(1.0, -2.0 * pi * (double)q);
    }
    return ph;
}

// rho -> U rho with U diagonal in the Fourier basis, applied over the
// first (z) index of every column.
inline void apply_spectral_left(DensityMatrixGrid& g, const std::vector<cplx>& phases) {
    std::vector<cplx> col(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        for (std::size_t i = 0; i < g.n; ++i) col[i] = g.at(i, j);
        fft_pow2(col, false);
        for (std::size_t m = 0; m < g.n; ++m) col[m] *= phases[m];
        fft_pow2(col, true);
        for (std::size_t i = 0; i < g.n; ++i) g.at(i, j) = col[i];
    }
}

inline void conjugate_transpose(DensityMatrixGrid& g) {
    for (std::size_t i = 0; i < g.n; ++i) {
        g.at(i, i) = std::conj(g.at(i, i));
        for (std::size_t j = i + 1; j < g.n; ++j) {
            cplx a = g.at(i, j);
            g.at(i, j) = std::conj(g.at(j, i));
            g.at(j, i) = std::conj(a);
        }
    }
}

} // namespace detail

// rho -> U rho U^dagger with U the free-propagation phase per Fourier mode.
inline DensityMatrixGrid free_propagate(const DensityMatrixGrid& grid, double d_nm) {
    grid.validate();
    if (d_nm < 0.0) throw domain_error("free_propagate: d must be >= 0");
    if (d_nm == 0.0) return grid;
    DensityMatrixGrid g = grid;
    double zt = kinematics::talbot_distance(g.beam, g.photon_energy);
    std::vector<cplx> phases = detail::talbot_phases(g.n, d_nm / zt);
    detail::apply_spectral_left(g, phases);
    detail::conjugate_transpose(g);
    detail::apply_spectral_left(g, phases);
    detail::conjugate_transpose(g);
    return g;
}

// rho -> P0(z) P0*(z') rho, then spectral propagation by d.  P0 is the
// unimodular comb phase e^{-2 i Im{beta e^{i omega z / v}}}, so trace,
// Hermiticity, and purity are preserved; d > 0 requires the sideband
// ladder to fit below the grid's Nyquist mode.
inline DensityMatrixGrid apply_pinem(const DensityMatrixGrid& grid, cplx beta, double d_nm) {
    grid.validate();
    if (d_nm < 0.0) throw domain_error("apply_pinem: d must be >= 0");
    std::size_t half = grid.n / 2;
    std::vector<double> j = specfun::bessel_j_sequence((int)half, 2.0 * std::abs(beta));
    double mass = j[0] * j[0];
    for (std::size_t k = 1; k <= half; ++k) mass += 2.0 * j[k] * j[k];
    if (1.0 - mass > 1e-8)
        throw contract_error("apply_pinem: sideband tail beyond the grid Nyquist mode > 1e-8");
    DensityMatrixGrid g = grid;
    double w = g.photon_energy / hbar_ev_fs;
    std::vector<cplx> p0(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        cplx u = beta * std::exp(cplx(0.0, w * g.z(i) / g.beam.velocity));
        p0[i] = std::polar(1.0, -2.0 * u.imag());
    }
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t k = 0; k < g.n; ++k) g.at(i, k) *= p0[i] * std::conj(p0[k]);
    if (d_nm > 0.0) return free_propagate(g, d_nm);
    return g;
}

struct GridDiagnostics {
    double trace;             // sum diag * l / n
    double hermiticity_error; // max |rho_ij - rho_ji^*|
    double purity;            // (l/n)^2 sum |rho_ij|^2
    std::vector<double> diagonal;
};

inline GridDiagnostics diagnostics(const DensityMatrixGrid& g) {
    GridDiagnostics d;
    double h = g.period / (double)g.n;
    d.trace = 0.0;
    d.hermiticity_error = 0.0;
    d.purity = 0.0;
    d.diagonal.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        d.diagonal[i] = g.at(i, i).real();
        d.trace += d.diagonal[i] * h;
        for (std::size_t j = 0; j < g.n; ++j) {
            d.purity += std::norm(g.at(i, j)) * h * h;
            if (j >= i)
                d.hermiticity_error =
                    std::max(d.hermiticity_error, std::abs(g.at(i, j) - std::conj(g.at(j, i))));
        }
    }
    return d;
}

} // namespace freebeam::density_matrix
