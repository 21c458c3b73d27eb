#pragma once

// Evanescent field profile of a passing electron, dipolar-scatterer EELS/CL
// probabilities, angle-resolved CL emission, and thermal loss/gain scaling.
//
// Probabilities are per unit omega with omega in rad/fs, so values carry fs.
// Fields are carried as e*E in eV/nm.

#include <array>
#include <cmath>
#include <complex>

#include "constants.hpp"
#include "errors.hpp"
#include "kinematics.hpp"
#include "specfun.hpp"

namespace freebeam::dipole_probe {

using kinematics::ElectronBeam;
using cplx = std::complex<double>;

struct FieldProfile {
    cplx F_z; // (i/gamma) K0(omega R / v gamma)
    cplx F_R; // -K1(omega R / v gamma)
    double R;     // nm
    double omega; // rad/fs
};

// Electron-field factor at the scatterer, beam displaced by R along +R_hat:
//   E(z, omega) = (2 e omega / v^2 gamma) e^{i omega z / v} (F_z zhat + F_R R_hat)
// with F_z = (i/gamma) K0(zeta), F_R = +K1(zeta), zeta = omega R / v gamma
// (the transverse field points from the scatterer toward the electron).
inline FieldProfile field_profile(const ElectronBeam& beam, double R_nm, double photon_energy_ev) {
    if (!(R_nm > 0.0)) throw domain_error("field_profile: R must be > 0 (K1 diverges at 0)");
    if (!(photon_energy_ev > 0.0)) throw domain_error("field_profile: photon energy must be > 0");
    double w = photon_energy_ev / hbar_ev_fs;
    double zeta = w * R_nm / (beam.velocity * beam.gamma);
    specfun::BesselPair k = specfun::modified_bessel_k(zeta);
    return {cplx(0.0, k.n0 / beam.gamma), cplx(k.n1, 0.0), R_nm, w};
}

// Isotropic Lorentzian polarizability with radiative-reaction correction:
//   alpha_bare = (3 c^3 g_r / 2 w0^2) / (w0^2 - w^2 - i w g_nr)
//   alpha = alpha_bare / (1 - (2i w^3 / 3 c^3) alpha_bare)
// evaluated in the combined form that never divides by zero on the real axis.
struct Polarizability {
    double hw0;      // resonance, eV
    double gamma_r;  // radiative rate, eV
    double gamma_nr; // nonradiative rate, eV

    cplx operator()(double omega_rad_fs) const {
        double w = omega_rad_fs;
        double w0 = hw0 / hbar_ev_fs;
        double gr = gamma_r / hbar_ev_fs;
        double gnr = gamma_nr / hbar_ev_fs;
        double c3 = c_nm_fs * c_nm_fs * c_nm_fs;
        double num = 3.0 * c3 * gr / (2.0 * w0 * w0);
        cplx den(w0 * w0 - w * w, -w * (gnr + w * w * gr / (w0 * w0)));
        return num / den; // nm^3
    }
};

inline Polarizability lorentzian_polarizability(double hw0_ev, double gr_ev, double gnr_ev) {
    if (!(hw0_ev > 0.0)) throw domain_error("lorentzian_polarizability: resonance energy must be > 0");
    if (!(gr_ev > 0.0)) throw domain_error("lorentzian_polarizability: radiative rate must be > 0");
    if (gnr_ev < 0.0) throw domain_error("lorentzian_polarizability: nonradiative rate must be >= 0");
    return {hw0_ev, gr_ev, gnr_ev};
}

struct ProbePair {
    double gamma_eels; // fs (probability per rad/fs)
    double gamma_cl;   // fs
};

// Gamma_EELS = (4 e^2 w^2 / pi hbar v^4 gamma^2) [K1^2 + K0^2/gamma^2] Im alpha
// Gamma_CL   = same prefactor and shape x (2 w^3 / 3 c^3) |alpha|^2
inline ProbePair eels_cl_dipole(const ElectronBeam& beam, double R0_nm,
                                const Polarizability& alpha, double photon_energy_ev) {
    if (!(R0_nm > 0.0)) throw domain_error("eels_cl_dipole: R0 must be > 0");
    if (!(photon_energy_ev > 0.0)) throw domain_error("eels_cl_dipole: photon energy must be > 0");
    double w = photon_energy_ev / hbar_ev_fs;
    double v = beam.velocity, g = beam.gamma;
    double zeta = w * R0_nm / (v * g);
    specfun::BesselPair k = specfun::modified_bessel_k(zeta);
    double shape = k.n1 * k.n1 + k.n0 * k.n0 / (g * g);
    double pref = 4.0 * e2_ev_nm * w * w / (pi * hbar_ev_fs * v * v * v * v * g * g);
    cplx a = alpha(w);
    double c3 = c_nm_fs * c_nm_fs * c_nm_fs;
    double eels = pref * shape * a.imag();
    double cl = pref * shape * (2.0 * w * w * w / (3.0 * c3)) * std::norm(a);
    return {eels, cl};
}

// Angle-resolved CL of the induced dipole p = alpha (2 e w / v^2 gamma) F(R0):
//   f = (w^2/c^2) (rhat x p) x rhat,  dGamma/dOmega dw = (c / 4 pi^2 hbar w) |f|^2.
// R0_dir is the unit 2-vector from the dipole toward the beam line.
inline double cl_angular_dipole(const ElectronBeam& beam, const std::array<double, 2>& R0_dir,
                                double R0_nm, const Polarizability& alpha, double photon_energy_ev,
                                const std::array<double, 3>& emission_dir) {
    double n2 = R0_dir[0] * R0_dir[0] + R0_dir[1] * R0_dir[1];
    double r2 = emission_dir[0] * emission_dir[0] + emission_dir[1] * emission_dir[1] +
                emission_dir[2] * emission_dir[2];
    if (std::abs(n2 - 1.0) > 1e-12 || std::abs(r2 - 1.0) > 1e-12)
        throw domain_error("cl_angular_dipole: direction vectors must be unit length");
    FieldProfile F = field_profile(beam, R0_nm, photon_energy_ev);
    double w = F.omega;
    cplx a = alpha(w);
    // e*p = alpha (2 e^2 w / v^2 gamma) F, eV nm^2 (Fourier-domain amplitude)
    double drive = 2.0 * e2_ev_nm * w / (beam.velocity * beam.velocity * beam.gamma);
    std::array<cplx, 3> ep = {a * drive * F.F_R * R0_dir[0], a * drive * F.F_R * R0_dir[1],
                              a * drive * F.F_z};
    cplx rp = ep[0] * emission_dir[0] + ep[1] * emission_dir[1] + ep[2] * emission_dir[2];
    double k2 = w * w / (c_nm_fs * c_nm_fs);
    double f2 = 0.0; // |e*f|^2 with f = k^2 (p - rhat (rhat.p))
    for (int i = 0; i < 3; ++i) f2 += std::norm(k2 * (ep[i] - rp * emission_dir[i]));
    return c_nm_fs / (4.0 * pi * pi * hbar_ev_fs * w) * f2 / e2_ev_nm;
}

enum class Statistics { bosonic, fermionic };

// Finite-temperature scaling of a zero-temperature spectrum:
//   bosonic:  loss (w>0) Gamma (n_T + 1), gain (w<0) Gamma n_T
//   fermionic: loss Gamma (1 - n^F), gain Gamma n^F
inline double thermal_scale(double zero_t_probability, double signed_omega_rad_fs,
                            double temperature_k, Statistics stats) {
    if (signed_omega_rad_fs == 0.0) throw domain_error("thermal_scale: omega must be nonzero");
    if (temperature_k < 0.0) throw domain_error("thermal_scale: temperature must be >= 0");
    double aw = std::abs(signed_omega_rad_fs);
    bool loss = signed_omega_rad_fs > 0.0;
    if (temperature_k == 0.0) return loss ? zero_t_probability : 0.0;
    double x = hbar_ev_fs * aw / (kb_ev_k * temperature_k);
    if (stats == Statistics::bosonic) {
        double n = 1.0 / std::expm1(x);
        return zero_t_probability * (loss ? n + 1.0 : n);
    }
    double nf = 1.0 / (std::exp(x) + 1.0);
    return zero_t_probability * (loss ? 1.0 - nf : nf);
}

} // namespace freebeam::dipole_probe
