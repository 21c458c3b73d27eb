#pragma once

// PINEM coupling coefficients (linear beta, ponderomotive phi and beta'),
// sideband combs with Talbot propagation phases, multicolor ladders, and
// temporal density profiles.
//
// Conventions: c_l = J_l(2|beta|) e^{i l arg(-beta)} e^{-2 pi i l^2 d / z_T},
// arg on the principal branch (-pi, pi].  Field samples are complex V/nm,
// carried as e*E in eV/nm.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "kinematics.hpp"
#include "specfun.hpp"

namespace freebeam::pinem {

using kinematics::ElectronBeam;
using cplx = std::complex<double>;

struct SampledLineField {
    std::vector<double> z;  // nm, uniform, strictly increasing
    std::vector<cplx> ex, ey, ez; // V/nm

    double spacing() const { return (z.back() - z.front()) / (double)(z.size() - 1); }

    void validate() const {
        if (z.size() < 2) throw contract_error("SampledLineField: need at least 2 samples");
        if (ex.size() != z.size() || ey.size() != z.size() || ez.size() != z.size())
            throw contract_error("SampledLineField: component arrays must match grid length");
        double h = spacing();
        if (!(h > 0.0)) throw contract_error("SampledLineField: grid must be strictly increasing");
        for (std::size_t i = 1; i < z.size(); ++i) {
            double hi = z[i] - z[i - 1];
            if (std::abs(hi - h) > 1e-9 * std::abs(h))
                throw contract_error("SampledLineField: grid must be uniform to 1e-9 relative");
        }
    }
};

namespace detail {

// Composite Simpson on a uniform grid; 3/8 rule absorbs an even panel count.
template <class F>
cplx simpson_uniform(std::size_t n, double h, F&& value) {
    if (n < 2) throw contract_error("simpson: need at least 2 samples");
    if (n == 2) return h / 2.0 * (value(0) + value(1));
    if (n == 3) return h / 3.0 * (value(0) + 4.0 * value(1) + value(2));
    std::size_t last = n - 1;
    cplx acc(0.0, 0.0);
    std::size_t stop = last; // exclusive end of the 1/3-rule region
    bool tail38 = (last % 2) != 0;
    if (tail38) stop = last - 3;
    if (stop >= 2) {
        cplx s = value(0) + value(stop);
        for (std::size_t i = 1; i < stop; i += 2) s += 4.0 * value(i);
        for (std::size_t i = 2; i < stop; i += 2) s += 2.0 * value(i);
        acc += h / 3.0 * s;
    }
    if (tail38)
        acc += 3.0 * h / 8.0 *
               (value(stop) + 3.0 * value(stop + 1) + 3.0 * value(stop + 2) + value(stop + 3));
    return acc;
}

inline void warn_support(const SampledLineField& f, std::ostream* warn) {
    if (!warn) return;
    double m = 0.0;
    for (std::size_t i = 0; i < f.z.size(); ++i) m = std::max(m, std::abs(f.ez[i]));
    if (m == 0.0) return;
    if (std::abs(f.ez.front()) >= 1e-6 * m || std::abs(f.ez.back()) >= 1e-6 * m)
        *warn << "beta_from_field: field endpoints are not negligible; "
                 "grid may not cover the interaction region\n";
}

} // namespace detail

// beta = (e / hbar omega) int dz E_z(z) e^{-i omega z / v}
inline cplx beta_from_field(const SampledLineField& field, double photon_energy_ev,
                            const ElectronBeam& beam, std::ostream* warn = nullptr) {
    field.validate();
    if (!(photon_energy_ev > 0.0)) throw domain_error("beta_from_field: photon energy must be > 0");
    detail::warn_support(field, warn);
    double w = photon_energy_ev / hbar_ev_fs;
    double h = field.spacing();
    cplx integral = detail::simpson_uniform(field.z.size(), h, [&](std::size_t i) {
        return field.ez[i] * std::exp(cplx(0.0, -w * field.z[i] / beam.velocity));
    });
    return integral / (hbar_ev_fs * w);
}

// beta for an isotropic dipolar scatterer under external illumination:
//   beta = -(2 i e omega / hbar v^2 gamma) alpha(omega) F*(R, omega) . E_ext
// with F the electron-field factor at the scatterer and the beam displaced
// along +x from it (F_R along x).  Equals the direct integral
// (1/hbar omega) int dz E_z e^{-i omega z / v} over the induced-dipole field.
template <class Alpha>
cplx beta_dipole(const ElectronBeam& beam, double R_nm, const Alpha& alpha,
                 double photon_energy_ev, const std::array<cplx, 3>& e_ext_v_nm) {
    if (!(R_nm > 0.0)) throw domain_error("beta_dipole: R must be > 0");
    if (!(photon_energy_ev > 0.0)) throw domain_error("beta_dipole: photon energy must be > 0");
    double w = photon_energy_ev / hbar_ev_fs;
    double zeta = w * R_nm / (beam.velocity * beam.gamma);
    specfun::BesselPair k = specfun::modified_bessel_k(zeta);
    cplx fz_conj(0.0, -k.n0 / beam.gamma); // conj{(i/gamma)K0}
    cplx fr_conj(k.n1, 0.0);
    cplx fdote = fz_conj * e_ext_v_nm[2] + fr_conj * e_ext_v_nm[0];
    return cplx(0.0, -2.0 * w / (hbar_ev_fs * beam.velocity * beam.velocity * beam.gamma)) *
           alpha(w) * fdote;
}

struct PonderomotiveTerms {
    double phi;      // transverse-intensity phase, dimensionless
    cplx beta_prime; // 2-omega comb coupling
};

// phi   = -(1/M omega^2) int dz [|Ex|^2 + |Ey|^2 + |Ez|^2/gamma^2]
// beta' = (-i/2M omega^2) int dz [Ex^2 + Ey^2 + Ez^2/gamma^2] e^{-2i omega z/v}
// with 1/M = e^2/(hbar m_e gamma v).
inline PonderomotiveTerms ponderomotive_terms(const SampledLineField& field,
                                              double photon_energy_ev, const ElectronBeam& beam,
                                              std::ostream* warn = nullptr) {
    field.validate();
    if (!(photon_energy_ev > 0.0))
        throw domain_error("ponderomotive_terms: photon energy must be > 0");
    detail::warn_support(field, warn);
    double w = photon_energy_ev / hbar_ev_fs;
    double h = field.spacing();
    double g2 = beam.gamma * beam.gamma;
    double minv = e2_ev_nm / (hbar_ev_fs * me_ev_fs2_nm2 * beam.gamma * beam.velocity);
    cplx quad_abs = detail::simpson_uniform(field.z.size(), h, [&](std::size_t i) {
        return cplx(std::norm(field.ex[i]) + std::norm(field.ey[i]) + std::norm(field.ez[i]) / g2,
                    0.0);
    });
    cplx quad_sq = detail::simpson_uniform(field.z.size(), h, [&](std::size_t i) {
        cplx s = field.ex[i] * field.ex[i] + field.ey[i] * field.ey[i] +
                 field.ez[i] * field.ez[i] / g2;
        return s * std::exp(cplx(0.0, -2.0 * w * field.z[i] / beam.velocity));
    });
    PonderomotiveTerms out;
    out.phi = -minv / (w * w) * quad_abs.real();
    out.beta_prime = cplx(0.0, -0.5) * minv / (w * w) * quad_sq;
    return out;
}

inline int auto_l_max(cplx beta) {
    double b = std::abs(beta);
    return (int)std::ceil(4.0 * b + 8.0 * std::sqrt(b + 1.0) + 20.0);
}

struct PinemInteraction {
    cplx beta;
    cplx beta_prime = 0.0;
    double phi = 0.0;
    double photon_energy; // eV
    double d;             // propagation distance, nm
    double talbot;        // z_T for (beam, photon energy), nm
    int l_max;
    std::vector<cplx> c; // c_{-l_max} .. c_{+l_max}

    cplx amplitude(int l) const {
        return std::abs(l) > l_max ? cplx(0.0, 0.0) : c[(std::size_t)(l + l_max)];
    }
};

// Sideband amplitudes of the propagated comb.  l_max <= 0 selects the
// automatic truncation rule.
inline PinemInteraction comb_amplitudes(cplx beta, double photon_energy_ev,
                                        const ElectronBeam& beam, double d_nm, int l_max = 0) {
    if (!(photon_energy_ev > 0.0)) throw domain_error("comb_amplitudes: photon energy must be > 0");
    if (l_max <= 0) l_max = auto_l_max(beta);
    PinemInteraction out;
    out.beta = beta;
    out.photon_energy = photon_energy_ev;
    out.d = d_nm;
    out.talbot = kinematics::talbot_distance(beam, photon_energy_ev);
    out.l_max = l_max;
    out.c.assign(2 * (std::size_t)l_max + 1, cplx(0.0, 0.0));
    double b2 = 2.0 * std::abs(beta);
    double ph0 = std::arg(-beta);
    std::vector<double> j = specfun::bessel_j_sequence(l_max, b2);
    double mass = 0.0;
    for (int l = -l_max; l <= l_max; ++l) {
        double jl = j[(std::size_t)std::abs(l)];
        if (l < 0 && (l & 1)) jl = -jl;
        double quad = -2.0 * pi * (double)l * (double)l * d_nm / out.talbot;
        out.c[(std::size_t)(l + l_max)] = jl * std::exp(cplx(0.0, l * ph0 + quad));
        mass += jl * jl;
    }
    if (std::abs(mass - 1.0) > 1e-10)
        throw contract_error("comb_amplitudes: l_max too small, sideband tail mass > 1e-10");
    return out;
}

struct MulticolorFactor {
    cplx beta;
    int harmonic; // >= 1, energy step in units of the base photon energy
};

// Populations on the base-frequency ladder from multiplicative combs,
// one per color; amplitudes convolve, harmonic k advances in steps of k.
inline std::vector<double> multicolor_populations(const std::vector<MulticolorFactor>& factors,
                                                  int l_max) {
    if (l_max <= 0) throw contract_error("multicolor_populations: l_max must be positive");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].harmonic < 1)
            throw contract_error("multicolor_populations: harmonics must be >= 1");
        for (std::size_t j = i + 1; j < factors.size(); ++j)
            if (factors[i].harmonic == factors[j].harmonic)
                throw contract_error("multicolor_populations: duplicate harmonic");
    }
    std::size_t n = 2 * (std::size_t)l_max + 1;
    std::vector<cplx> amp(n, cplx(0.0, 0.0));
    amp[(std::size_t)l_max] = 1.0;
    for (const MulticolorFactor& f : factors) {
        int m_max = auto_l_max(f.beta);
        std::vector<double> j = specfun::bessel_j_sequence(m_max, 2.0 * std::abs(f.beta));
        double ph0 = std::arg(-f.beta);
        std::vector<cplx> next(n, cplx(0.0, 0.0));
        for (int m = -m_max; m <= m_max; ++m) {
            double jm = j[(std::size_t)std::abs(m)];
            if (m < 0 && (m & 1)) jm = -jm;
            if (jm == 0.0) continue;
            cplx cm = jm * std::exp(cplx(0.0, m * ph0));
            long shift = (long)m * f.harmonic;
            for (long l = -l_max; l <= l_max; ++l) {
                long src = l - shift;
                if (src < -l_max || src > l_max) continue;
                next[(std::size_t)(l + l_max)] += cm * amp[(std::size_t)(src + l_max)];
            }
        }
        amp.swap(next);
    }
    std::vector<double> p(n);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::norm(amp[i]);
        mass += p[i];
    }
    if (std::abs(mass - 1.0) > 1e-10)
        throw contract_error("multicolor_populations: l_max too small, population tail > 1e-10");
    return p;
}

// Probability density over one optical period, sampled at n_tau points
// tau_k = k T / n_tau, T = 2 pi / omega.  Period mean is 1.
inline std::vector<double> density_vs_time(const PinemInteraction& in, int n_tau) {
    if (n_tau < 2) throw contract_error("density_vs_time: need at least 2 samples");
    std::vector<double> out((std::size_t)n_tau);
    for (int k = 0; k < n_tau; ++k) {
        double wt = 2.0 * pi * (double)k / (double)n_tau; // omega * tau
        cplx s(0.0, 0.0);
        for (int l = -in.l_max; l <= in.l_max; ++l)
            s += in.amplitude(l) * std::exp(cplx(0.0, -l * wt));
        out[(std::size_t)k] = std::norm(s);
    }
    return out;
}

} // namespace freebeam::pinem
