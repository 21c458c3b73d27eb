#pragma once

// Gaussian wavepacket trains: overlap normalization, per-electron {Gamma, Q}
// summaries, two-electron interference scenario curves, and the periodic
// (N, L) train total.
//
// Nonoverlapping-limit forms (I_{ss'} -> delta_{ss'}):
//   Gamma = sum_s |g_s|^2 |bt(site_s)|^2 / sum_s |g_s|^2
//   Q     = sqrt(S) sum_s |g_s|^2 e^{i omega z_s / v} bt(site_s) / sum_s |g_s|^2
//   S     = e^{-omega^2 Delta^2 / 2 v^2}
// Scenario curves evaluate these forms at a prescribed S over arbitrary phase
// separations (the formal limit in which S is held fixed), composed with the
// multi-electron excitation total.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coherence.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "kinematics.hpp"

namespace freebeam::wavepackets {

using kinematics::ElectronBeam;
using cplx = std::complex<double>;

struct Packet {
    double z;    // nm
    int site;    // lateral site label
    cplx weight; // gamma_s
};

struct WavepacketTrain {
    std::vector<Packet> packets;
    double delta; // nm
    double norm;  // sqrt(sum_{ss'} g_s g_s'^* I_ss')
    bool nonoverlapping;
};

inline double overlap_integral(const Packet& a, const Packet& b, double delta) {
    if (a.site != b.site) return 0.0;
    double dz = a.z - b.z;
    return std::exp(-dz * dz / (4.0 * delta * delta));
}

inline WavepacketTrain build_train(std::vector<Packet> packets, double delta) {
    if (!(delta > 0.0)) throw contract_error("build_train: width must be > 0");
    if (packets.empty()) throw contract_error("build_train: need at least one packet");
    double n2 = 0.0;
    bool nonoverlap = true;
    for (std::size_t s = 0; s < packets.size(); ++s)
        for (std::size_t t = 0; t < packets.size(); ++t) {
            double i_st = overlap_integral(packets[s], packets[t], delta);
            n2 += (packets[s].weight * std::conj(packets[t].weight) * i_st).real();
            if (s != t && i_st >= 1e-8) nonoverlap = false;
        }
    if (!(n2 > 0.0)) throw contract_error("build_train: weights give zero norm");
    return {std::move(packets), delta, std::sqrt(n2), nonoverlap};
}

using Coupling = std::function<cplx(int)>;

struct GammaQ {
    double gamma;
    cplx q;
};

inline double elastic_suppression(double delta_nm, double photon_energy_ev,
                                  const ElectronBeam& beam) {
    double w = photon_energy_ev / hbar_ev_fs;
    double x = w * delta_nm / beam.velocity;
    return std::exp(-0.5 * x * x);
}

// Nonoverlapping-limit summary.  s_formal evaluates the limit forms at the
// given S regardless of the overlap flag (used for scenario assembly); when
// absent the train must satisfy the nonoverlap condition and S follows from
// (Delta, omega, v).
inline GammaQ train_gamma_Q(const WavepacketTrain& train, const Coupling& coupling,
                            double photon_energy_ev, const ElectronBeam& beam,
                            std::optional<double> s_formal = std::nullopt) {
    if (!(photon_energy_ev > 0.0)) throw domain_error("train_gamma_Q: photon energy must be > 0");
    if (!s_formal && !train.nonoverlapping)
        throw contract_error(
            "train_gamma_Q: overlapping packets; use train_gamma_Q_full or pass S explicitly");
    double s = s_formal ? *s_formal : elastic_suppression(train.delta, photon_energy_ev, beam);
    double w = photon_energy_ev / hbar_ev_fs;
    double wsum = 0.0, gsum = 0.0;
    cplx qsum(0.0, 0.0);
    for (const Packet& p : train.packets) {
        double g2 = std::norm(p.weight);
        cplx bt = coupling(p.site);
        wsum += g2;
        gsum += g2 * std::norm(bt);
        qsum += g2 * std::exp(cplx(0.0, w * p.z / beam.velocity)) * bt;
    }
    return {gsum / wsum, std::sqrt(s) * qsum / wsum};
}

// Full-overlap summary with the complete I_{ss'} matrix.
inline GammaQ train_gamma_Q_full(const WavepacketTrain& train, const Coupling& coupling,
                                 double photon_energy_ev, const ElectronBeam& beam) {
    if (!(photon_energy_ev > 0.0))
        throw domain_error("train_gamma_Q_full: photon energy must be > 0");
    double s = elastic_suppression(train.delta, photon_energy_ev, beam);
    double w = photon_energy_ev / hbar_ev_fs;
    cplx den(0.0, 0.0), gnum(0.0, 0.0), qnum(0.0, 0.0);
    for (const Packet& a : train.packets)
        for (const Packet& b : train.packets) {
            double i_ab = overlap_integral(a, b, train.delta);
            if (i_ab == 0.0) continue;
            cplx gg = a.weight * std::conj(b.weight) * i_ab;
            den += gg;
            gnum += gg * std::norm(coupling(a.site));
            qnum += gg * std::exp(cplx(0.0, 0.5 * w * (a.z + b.z) / beam.velocity)) *
                    coupling(a.site);
        }
    return {(gnum / den).real(), std::sqrt(s) * qnum / den};
}

enum class Scenario { fig5b, fig5c, fig6 };
enum class Occupancy { one_per_packet, shared };

struct ScenarioCurve {
    std::vector<double> phi;
    std::vector<double> ratio; // Gamma_total / (N Gamma0)
    std::string scenario;
    std::string occupancy;
    double s;
};

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::fig5b: return "fig5b";
        case Scenario::fig5c: return "fig5c";
        case Scenario::fig6: return "fig6";
    }
    return "?";
}

inline const char* to_string(Occupancy o) {
    return o == Occupancy::one_per_packet ? "one-per-packet" : "shared";
}

namespace detail {

// Reference frame used to map phases onto packet positions; the curves
// depend only on phi = omega a / v, so any beam works.
inline const ElectronBeam& reference_beam() {
    static const ElectronBeam b = kinematics::beam_from_kinetic_energy(1e5);
    return b;
}

inline double ratio_from_trains(const std::vector<WavepacketTrain>& trains,
                                const Coupling& coupling, double s, double hw,
                                const ElectronBeam& beam) {
    std::vector<coherence::CouplingSummary> summaries;
    summaries.reserve(trains.size());
    for (const WavepacketTrain& t : trains) {
        GammaQ gq = train_gamma_Q(t, coupling, hw, beam, s);
        summaries.push_back({gq.gamma, gq.q, ""});
    }
    double total = coherence::total_excitation_multi(summaries);
    return total / ((double)trains.size() * summaries.front().gamma0);
}

} // namespace detail

// Two-electron interference curves assembled from per-electron {Gamma, Q}
// summaries and the multi-electron total.  For the lattice scenario the
// abscissa is omega a / v - kb, realized by phasing the second site's
// coupling with e^{-i kb}.
inline ScenarioCurve scenario_curves(Scenario scenario, Occupancy occupancy, double s_param,
                                     const std::vector<double>& phi_grid, double kb_dot_b = 0.0) {
    if (!(s_param > 0.0) || s_param > 1.0)
        throw contract_error("scenario_curves: S must lie in (0, 1]");
    if (phi_grid.empty()) throw contract_error("scenario_curves: empty phi grid");
    const ElectronBeam& beam = detail::reference_beam();
    const double hw = 1.5;
    const double w = hw / hbar_ev_fs;
    const double delta = 1.0; // carried by the train, unused at prescribed S

    int site_b = 0, site_other = 1;
    Coupling coupling;
    switch (scenario) {
        case Scenario::fig5b:
            site_other = site_b; // same lateral site, identical coupling
            coupling = [](int) { return cplx(1.0, 0.0); };
            break;
        case Scenario::fig5c:
            // opposite sites couple with opposite sign: bt(-b) = -bt(b)
            coupling = [](int site) { return site == 0 ? cplx(1.0, 0.0) : cplx(-1.0, 0.0); };
            break;
        case Scenario::fig6:
            // mode-propagation phase between the lattice sites
            coupling = [kb_dot_b](int site) {
                return site == 0 ? cplx(1.0, 0.0) : std::exp(cplx(0.0, -kb_dot_b));
            };
            break;
        default: throw contract_error("scenario_curves: invalid scenario tag");
    }

    ScenarioCurve out;
    out.phi = phi_grid;
    out.ratio.resize(phi_grid.size());
    out.scenario = to_string(scenario);
    out.occupancy = to_string(occupancy);
    out.s = s_param;
    for (std::size_t i = 0; i < phi_grid.size(); ++i) {
        // abscissa phi = omega a / v; the lattice case adds the lateral
        // propagation phase -k.b through the site-1 coupling
        double za = phi_grid[i] * beam.velocity / w;
        Packet p0{0.0, site_b, cplx(1.0, 0.0)};
        Packet p1{za, site_other, cplx(1.0, 0.0)};
        std::vector<WavepacketTrain> trains;
        if (occupancy == Occupancy::one_per_packet) {
            trains.push_back(build_train({p0}, delta));
            trains.push_back(build_train({p1}, delta));
        } else {
            WavepacketTrain t = build_train({p0, p1}, delta);
            trains.push_back(t);
            trains.push_back(t);
        }
        out.ratio[i] = detail::ratio_from_trains(trains, coupling, s_param, hw, beam);
    }
    return out;
}

inline ScenarioCurve scenario_curves(Scenario scenario, Occupancy occupancy, double delta_nm,
                                     double photon_energy_ev, const ElectronBeam& beam,
                                     const std::vector<double>& phi_grid, double kb_dot_b = 0.0) {
    return scenario_curves(scenario, occupancy,
                           elastic_suppression(delta_nm, photon_energy_ev, beam), phi_grid,
                           kb_dot_b);
}

// Gamma / N Gamma0 = 1 + (N-1)/L^2 S sin^2(L phi/2) / sin^2(phi/2),
// with the removable singularity at phi = 2 pi k taking the limit L^2.
inline ScenarioCurve periodic_train_total(long n_electrons, long l_packets, double s_param,
                                          const std::vector<double>& phi_grid) {
    if (n_electrons < 1) throw contract_error("periodic_train_total: need N >= 1");
    if (l_packets < 1) throw contract_error("periodic_train_total: need L >= 1");
    if (!(s_param > 0.0) || s_param > 1.0)
        throw contract_error("periodic_train_total: S must lie in (0, 1]");
    ScenarioCurve out;
    out.phi = phi_grid;
    out.ratio.resize(phi_grid.size());
    out.scenario = "train";
    out.occupancy = "periodic";
    out.s = s_param;
    double nl = (double)l_packets;
    for (std::size_t i = 0; i < phi_grid.size(); ++i) {
        double half = 0.5 * phi_grid[i];
        double sd = std::sin(half);
        double u = sd == 0.0 ? nl : std::sin(nl * half) / sd;
        out.ratio[i] = 1.0 + ((double)n_electrons - 1.0) * s_param * (u / nl) * (u / nl);
    }
    return out;
}

// Same ratio assembled through build_train + train_gamma_Q +
// total_excitation_multi: N identical electrons, each spread over L
// periodic packets at longitudinal phase spacing phi.
inline double periodic_train_ratio_pipeline(long n_electrons, long l_packets, double s_param,
                                            double phi) {
    if (n_electrons < 1 || l_packets < 1)
        throw contract_error("periodic_train_ratio_pipeline: need N, L >= 1");
    const ElectronBeam& beam = detail::reference_beam();
    const double hw = 1.5;
    const double w = hw / hbar_ev_fs;
    std::vector<Packet> packets;
    packets.reserve((std::size_t)l_packets);
    for (long s = 0; s < l_packets; ++s)
        packets.push_back({(double)s * phi * beam.velocity / w, 0, cplx(1.0, 0.0)});
    WavepacketTrain t = build_train(std::move(packets), 1.0);
    std::vector<WavepacketTrain> trains((std::size_t)n_electrons, t);
    return detail::ratio_from_trains(trains, [](int) { return cplx(1.0, 0.0); }, s_param, hw,
                                     beam);
}

} // namespace freebeam::wavepackets
