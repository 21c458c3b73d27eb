#pragma once

// Relativistic beam kinematics and the characteristic scales of
// light-modulated electron beams: Talbot distance, ponderomotive threshold
// field, impulse-approximation Coulomb degradation, mode period/spacing.

#include <cmath>

#include "constants.hpp"
#include "errors.hpp"

namespace freebeam::kinematics {

struct ElectronBeam {
    double kinetic_energy; // eV
    double gamma;          // 1 + E_k / (m_e c^2)
    double beta;           // v/c
    double velocity;       // nm/fs
    double wavelength;     // pm
};

inline ElectronBeam beam_from_kinetic_energy(double ek_ev) {
    if (!(ek_ev > 0.0)) throw domain_error("beam_from_kinetic_energy: E_k must be > 0");
    ElectronBeam b;
    b.kinetic_energy = ek_ev;
    b.gamma = 1.0 + ek_ev / me_c2_ev;
    b.beta = std::sqrt(1.0 - 1.0 / (b.gamma * b.gamma));
    b.velocity = b.beta * c_nm_fs;
    // lambda = h c / sqrt(E_k^2 + 2 E_k m_e c^2), reported in pm
    b.wavelength = 2.0 * pi * hbar_ev_fs * c_nm_fs /
                   std::sqrt(ek_ev * ek_ev + 2.0 * ek_ev * me_c2_ev) * 1e3;
    return b;
}

// z_T = 4 pi m_e v^3 gamma^3 / (hbar omega^2), nm
inline double talbot_distance(const ElectronBeam& beam, double photon_energy_ev) {
    if (!(photon_energy_ev > 0.0)) throw domain_error("talbot_distance: photon energy must be > 0");
    double w = photon_energy_ev / hbar_ev_fs;
    double v = beam.velocity, g = beam.gamma;
    return 4.0 * pi * me_ev_fs2_nm2 * v * v * v * g * g * g / (hbar_ev_fs * w * w);
}

// E_thres = 2 m_e gamma v omega / e, reported in V/m
inline double threshold_field(const ElectronBeam& beam, double photon_energy_ev) {
    if (!(photon_energy_ev > 0.0)) throw domain_error("threshold_field: photon energy must be > 0");
    double w = photon_energy_ev / hbar_ev_fs;
    double e_field_ev_nm = 2.0 * me_ev_fs2_nm2 * beam.gamma * beam.velocity * w; // e*E in eV/nm
    return e_field_ev_nm * 1e9; // 1 V/nm = 1e9 V/m
}

enum class DegradationKind { longitudinal, transverse };

// Impulse approximation: constant force e^2/d^2 acting over time L/v.
// longitudinal: Delta E = e^2 L / d^2; transverse: Delta theta = Delta E / (m_e c^2 beta^2 gamma)
inline double coulomb_degradation(const ElectronBeam& beam, double path_length_nm,
                                  double separation_nm, DegradationKind kind) {
    if (!(path_length_nm > 0.0)) throw domain_error("coulomb_degradation: L must be > 0");
    if (!(separation_nm > 0.0)) throw domain_error("coulomb_degradation: d must be > 0");
    double dE = e2_ev_nm * path_length_nm / (separation_nm * separation_nm);
    if (kind == DegradationKind::longitudinal) return dE;
    return dE / (me_c2_ev * beam.beta * beam.beta * beam.gamma);
}

struct ModePeriodSpacing {
    double period;  // fs
    double spacing; // nm
};

inline ModePeriodSpacing mode_period_spacing(const ElectronBeam& beam, double mode_energy_ev) {
    if (!(mode_energy_ev > 0.0)) throw domain_error("mode_period_spacing: mode energy must be > 0");
    double period = 2.0 * pi * hbar_ev_fs / mode_energy_ev;
    return {period, beam.velocity * period};
}

} // namespace freebeam::kinematics
