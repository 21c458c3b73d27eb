#pragma once

// Unit system: energies in eV, lengths in nm, times in fs.
// Fields enter as V/nm and are carried internally as e*E in eV/nm
// (numerically identical); V/m appears only at the threshold_field boundary.

namespace freebeam {

inline constexpr double hbar_ev_fs = 0.6582119569;   // eV fs
inline constexpr double c_nm_fs = 299.792458;        // nm/fs
inline constexpr double me_c2_ev = 510998.95;        // eV
inline constexpr double e2_ev_nm = 1.43996;          // Gaussian e^2, eV nm
inline constexpr double kb_ev_k = 8.617333262e-5;    // eV/K
inline constexpr double pi = 3.14159265358979323846;

// electron mass in eV fs^2 / nm^2
inline constexpr double me_ev_fs2_nm2 = me_c2_ev / (c_nm_fs * c_nm_fs);

inline constexpr const char* version = "0.1.0";

} // namespace freebeam
