// Acceptance gate: one line per criterion, pinned tolerances, nonzero exit
// on any failure.  Each check names the quantity, the computed value, and
// the accepted band so a failing run is diagnosable from the log alone.

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <freebeam/freebeam.hpp>

#include "../oracles.hpp"

using namespace freebeam;
using cplx = std::complex<double>;

namespace {

int failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", idx, detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main() {
    kinematics::ElectronBeam b100 = kinematics::beam_from_kinetic_energy(1e5);

    // 1. revival distance at (100 keV, 1.5 eV): 159 mm within 1%
    {
        double zt_mm = kinematics::talbot_distance(b100, 1.5) * 1e-6;
        bool ok = std::abs(zt_mm / 159.0 - 1.0) < 0.01;
        report(1, ok, fmt("revival distance %.4g mm (159 mm +- 1%%)", zt_mm));
    }

    // 2. ponderomotive threshold field at (100 keV, 1.5 eV): 5e12 V/m within 3%
    {
        double field = kinematics::threshold_field(b100, 1.5);
        bool ok = std::abs(field / 5e12 - 1.0) < 0.03;
        report(2, ok, fmt("threshold field %.4g V/m (5e12 V/m +- 3%%)", field));
    }

    // 3. thermal loss/gain ratio: 6.92 +- 0.01 at (50 meV, 300 K); identity
    //    loss/gain = e^{hw/kT} to 1e-12 across an (omega, T) grid
    {
        double w50 = 0.050 / hbar_ev_fs;
        double ratio = dipole_probe::thermal_scale(1.0, w50, 300.0, dipole_probe::Statistics::bosonic) /
                       dipole_probe::thermal_scale(1.0, -w50, 300.0, dipole_probe::Statistics::bosonic);
        bool ok = std::abs(ratio - 6.92) <= 0.01;
        double worst = 0.0;
        for (double hw_mev : {1.0, 5.0, 20.0, 50.0, 120.0})
            for (double t : {77.0, 300.0, 1000.0}) {
                double w = hw_mev * 1e-3 / hbar_ev_fs;
                double r =
                    dipole_probe::thermal_scale(1.0, w, t, dipole_probe::Statistics::bosonic) /
                    dipole_probe::thermal_scale(1.0, -w, t, dipole_probe::Statistics::bosonic);
                double x = hw_mev * 1e-3 / (kb_ev_k * t);
                worst = std::max(worst, std::abs(r / std::exp(x) - 1.0));
            }
        ok = ok && worst < 1e-12;
        report(3, ok,
               fmt("loss/gain %.4f at 50 meV, 300 K (6.92 +- 0.01); identity residual %.2g (< 1e-12)",
                   ratio, worst));
    }

    // 4. pair-interaction degradation at (100 keV, L=10 um, d=1 um):
    //    14.4 meV and 0.078 urad
    {
        double de_mev =
            kinematics::coulomb_degradation(b100, 1e4, 1e3, kinematics::DegradationKind::longitudinal) *
            1e3;
        double dth_urad =
            kinematics::coulomb_degradation(b100, 1e4, 1e3, kinematics::DegradationKind::transverse) *
            1e6;
        bool ok = std::abs(de_mev - 14.4) <= 0.1 && std::abs(dth_urad - 0.078) <= 0.002;
        report(4, ok,
               fmt("energy spread %.3f meV (14.4 +- 0.1), deflection %.4f urad (0.078 +- 0.002)",
                   de_mev, dth_urad));
    }

    // 5. de Broglie wavelength: 6.98 pm at 30 keV, 1.97 pm at 300 keV, 1%
    {
        double l30 = kinematics::beam_from_kinetic_energy(30e3).wavelength;
        double l300 = kinematics::beam_from_kinetic_energy(300e3).wavelength;
        bool ok = std::abs(l30 / 6.98 - 1.0) < 0.01 && std::abs(l300 / 1.97 - 1.0) < 0.01;
        report(5, ok, fmt("wavelength %.4f pm at 30 keV, %.4f pm at 300 keV (6.98 / 1.97 +- 1%%)",
                          l30, l300));
    }

    // 6. mode period and spacing at (1 eV, 100 keV): 4.14 fs, 680 nm, 1%
    {
        kinematics::ModePeriodSpacing ms = kinematics::mode_period_spacing(b100, 1.0);
        bool ok = std::abs(ms.period / 4.14 - 1.0) < 0.01 && std::abs(ms.spacing / 680.0 - 1.0) < 0.01;
        report(6, ok, fmt("mode period %.4f fs (4.14 +- 1%%), spacing %.2f nm (680 +- 1%%)",
                          ms.period, ms.spacing));
    }

    // 7. coherence bound: optimize_M(m=1) max |M|^2 = 0.3386 +- 0.0005;
    //    closed form vs direct sum to 1e-10 on a 20 x 20 x 3 grid; < 5 s
    {
        auto t0 = std::chrono::steady_clock::now();
        double zt = kinematics::talbot_distance(b100, 1.5);
        coherence::OptimalComb best = coherence::optimize_M(1, 1.5, b100, 0.05, 2.0, 0.0, 0.3 * zt);
        double worst = 0.0;
        for (int m = 1; m <= 3; ++m)
            for (int ib = 0; ib < 20; ++ib)
                for (int id = 0; id < 20; ++id) {
                    double beta = 0.05 + (2.0 - 0.05) * ib / 19.0;
                    double d = 0.3 * zt * id / 19.0;
                    coherence::PinemCoherence pc =
                        coherence::coherence_M_pinem(cplx(beta, 0.0), d, m, 1.5, b100);
                    worst = std::max(worst, std::abs(std::abs(pc.m_direct) - pc.m_closed_abs));
                }
        double dt = seconds_since(t0);
        bool ok = std::abs(best.m2 - 0.3386) <= 0.0005 && worst < 1e-10 && dt < 5.0;
        report(7, ok,
               fmt("max |M|^2 = %.6f (0.3386 +- 0.0005); closed-vs-direct %.2g (< 1e-10); %.2f s (< 5)",
                   best.m2, worst, dt));
    }

    // 8. bunched identical arrivals exact; dilute Monte Carlo mean = N Gamma0
    //    within 3 sigma over 1e3 draws; < 10 s
    {
        auto t0 = std::chrono::steady_clock::now();
        double gamma0 = 1.0;
        cplx q0(1.0, 0.0);
        std::vector<double> same(100, 0.0);
        double got = coherence::bunched_total(same, gamma0, q0, 1.5, b100);
        double want = 100.0 * gamma0 + 100.0 * 99.0 * std::norm(q0);
        bool exact = got == want;

        double w = 1.5 / hbar_ev_fs;
        double period = 2.0 * pi * b100.velocity / w;
        std::mt19937 gen(813559u);
        std::uniform_real_distribution<double> pos(0.0, 1000.0 * period);
        const int draws = 1000;
        std::vector<double> totals((std::size_t)draws);
        for (int k = 0; k < draws; ++k) {
            std::vector<double> z(100);
            for (double& zj : z) zj = pos(gen);
            totals[(std::size_t)k] = coherence::bunched_total(z, gamma0, q0, 1.5, b100);
        }
        double mean = 0.0;
        for (double t : totals) mean += t;
        mean /= draws;
        double var = 0.0;
        for (double t : totals) var += (t - mean) * (t - mean);
        double se = std::sqrt(var / (draws - 1.0) / draws);
        double dt = seconds_since(t0);
        bool ok = exact && std::abs(mean - 100.0) <= 3.0 * se && dt < 10.0;
        report(8, ok,
               fmt("identical arrivals %s; dilute mean %.3f vs 100 (3 sigma = %.3f); %.2f s (< 10)",
                   exact ? "exact" : "NOT exact", mean, 3.0 * se, dt));
    }

    // 9. interference curves from the train pipeline: 1 +- S cos(phi),
    //    1 + S cos^2(phi/2), 1 + S sin^2(phi/2), and the (N, L) formula to
    //    1e-10 at S = 0.8825; the L=2, N=2 reduction is exact
    {
        double s = 0.8825;
        std::vector<double> phi(256);
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi[i] = 2.0 * pi * (double)i / (double)(phi.size() - 1);
        wavepackets::ScenarioCurve b_one = wavepackets::scenario_curves(
            wavepackets::Scenario::fig5b, wavepackets::Occupancy::one_per_packet, s, phi);
        wavepackets::ScenarioCurve c_one = wavepackets::scenario_curves(
            wavepackets::Scenario::fig5c, wavepackets::Occupancy::one_per_packet, s, phi);
        wavepackets::ScenarioCurve b_sh = wavepackets::scenario_curves(
            wavepackets::Scenario::fig5b, wavepackets::Occupancy::shared, s, phi);
        wavepackets::ScenarioCurve c_sh = wavepackets::scenario_curves(
            wavepackets::Scenario::fig5c, wavepackets::Occupancy::shared, s, phi);
        double worst = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            double h = std::sin(phi[i] / 2.0), ch = std::cos(phi[i] / 2.0);
            worst = std::max(worst, std::abs(b_one.ratio[i] - (1.0 + s * std::cos(phi[i]))));
            worst = std::max(worst, std::abs(c_one.ratio[i] - (1.0 - s * std::cos(phi[i]))));
            worst = std::max(worst, std::abs(b_sh.ratio[i] - (1.0 + s * ch * ch)));
            worst = std::max(worst, std::abs(c_sh.ratio[i] - (1.0 + s * h * h)));
        }
        double worst_train = 0.0;
        for (long n : {2L, 5L})
            for (long l : {2L, 3L, 7L})
                for (double p : {0.0, 0.37, 1.8, pi, 4.9}) {
                    double got = wavepackets::periodic_train_ratio_pipeline(n, l, s, p);
                    double sd = std::sin(p / 2.0);
                    double u = sd == 0.0 ? (double)l : std::sin((double)l * p / 2.0) / sd;
                    double want = 1.0 + ((double)n - 1.0) * s * (u / (double)l) * (u / (double)l);
                    worst_train = std::max(worst_train, std::abs(got - want));
                }
        bool reduction_exact = true;
        for (double p : {0.0, 0.31, 1.2, pi, 5.1}) {
            wavepackets::ScenarioCurve sh = wavepackets::scenario_curves(
                wavepackets::Scenario::fig5b, wavepackets::Occupancy::shared, s, {p});
            if (wavepackets::periodic_train_ratio_pipeline(2, 2, s, p) != sh.ratio[0])
                reduction_exact = false;
        }
        bool ok = worst < 1e-10 && worst_train < 1e-10 && reduction_exact;
        report(9, ok,
               fmt("curve residual %.2g, train residual %.2g (< 1e-10); L=2,N=2 reduction %s",
                   worst, worst_train, reduction_exact ? "exact" : "NOT exact"));
    }

    // 10. comb unitarity to 1e-10 for |beta| <= 6; pointwise reconstruction
    //     to 1e-9; consecutive-interaction addition to 1e-10
    {
        double worst_mass = 0.0;
        for (double babs : {0.5, 1.0, 2.0, 3.0, 4.5, 6.0}) {
            pinem::PinemInteraction in =
                pinem::comb_amplitudes(std::polar(babs, 0.7), 1.5, b100, 0.0);
            double mass = 0.0;
            for (const cplx& c : in.c) mass += std::norm(c);
            worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        }
        cplx beta = std::polar(1.7, 0.8);
        pinem::PinemInteraction in = pinem::comb_amplitudes(beta, 1.5, b100, 0.0);
        double worst_ja = 0.0;
        for (int k = 0; k < 64; ++k) {
            double theta = 2.0 * pi * k / 64.0;
            cplx sum(0.0, 0.0);
            for (int l = -in.l_max; l <= in.l_max; ++l)
                sum += in.amplitude(l) * std::exp(cplx(0.0, l * theta));
            cplx direct = std::exp(cplx(0.0, -2.0 * (beta * std::exp(cplx(0.0, theta))).imag()));
            worst_ja = std::max(worst_ja, std::abs(sum - direct));
        }
        cplx b1 = std::polar(0.9, 0.2), b2 = std::polar(0.6, -1.1);
        pinem::PinemInteraction c1 = pinem::comb_amplitudes(b1, 1.5, b100, 0.0);
        pinem::PinemInteraction c2 = pinem::comb_amplitudes(b2, 1.5, b100, 0.0);
        pinem::PinemInteraction c12 = pinem::comb_amplitudes(b1 + b2, 1.5, b100, 0.0);
        double worst_add = 0.0;
        for (int l = -c12.l_max; l <= c12.l_max; ++l) {
            cplx conv(0.0, 0.0);
            for (int m = -c1.l_max; m <= c1.l_max; ++m)
                conv += c1.amplitude(m) * c2.amplitude(l - m);
            worst_add = std::max(worst_add, std::abs(conv - c12.amplitude(l)));
        }
        bool ok = worst_mass < 1e-10 && worst_ja < 1e-9 && worst_add < 1e-10;
        report(10, ok,
               fmt("unitarity %.2g (< 1e-10); reconstruction %.2g (< 1e-9); addition %.2g (< 1e-10)",
                   worst_mass, worst_ja, worst_add));
    }

    // 11. reciprocity: beta_dipole equals quadrature of the coupling integral
    //     over the retarded dipole field to relative 1e-4, 10 random sets; < 5 s
    {
        auto t0 = std::chrono::steady_clock::now();
        std::mt19937 gen(20260819u);
        auto u = [&](double lo, double hi) {
            return lo + (hi - lo) * std::generate_canonical<double, 53>(gen);
        };
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            double ek = 60e3 + 240e3 * u(0.0, 1.0);
            double hw = 0.8 + 2.2 * u(0.0, 1.0);
            double r0 = 20.0 + 100.0 * u(0.0, 1.0);
            double hw0 = hw * (0.9 + 0.2 * u(0.0, 1.0));
            double gr = 1e-3 + 0.099 * u(0.0, 1.0);
            double gnr = 0.1 * u(0.0, 1.0);
            kinematics::ElectronBeam beam = kinematics::beam_from_kinetic_energy(ek);
            dipole_probe::Polarizability alpha =
                dipole_probe::lorentzian_polarizability(hw0, gr, gnr);
            std::array<cplx, 3> e_ext = {cplx(u(-1.0, 1.0), u(-1.0, 1.0)),
                                         cplx(u(-1.0, 1.0), u(-1.0, 1.0)),
                                         cplx(u(-1.0, 1.0), u(-1.0, 1.0))};
            cplx got = pinem::beta_dipole(beam, r0, alpha, hw, e_ext);
            double w = hw / hbar_ev_fs;
            std::array<cplx, 3> p = {alpha(w) * e_ext[0], alpha(w) * e_ext[1], alpha(w) * e_ext[2]};
            cplx want = oracles::beta_quadrature_dipole(p, r0, w, beam);
            worst = std::max(worst, std::abs(got - want) / std::abs(want));
        }
        double dt = seconds_since(t0);
        bool ok = worst < 1e-4 && dt < 5.0;
        report(11, ok, fmt("worst relative error %.2g (< 1e-4) over 10 sets; %.2f s (< 5)", worst, dt));
    }

    // 12. optical theorem: EELS >= CL on 1e3 random configurations; equality
    //     to 1e-10 at gamma_nr = 0 on resonance; angular integral = total CL
    //     to 1e-6
    {
        std::mt19937 gen(424243u);
        auto u = [&](double lo, double hi) {
            return lo + (hi - lo) * std::generate_canonical<double, 53>(gen);
        };
        bool ordered = true;
        for (int k = 0; k < 1000; ++k) {
            kinematics::ElectronBeam beam =
                kinematics::beam_from_kinetic_energy(u(30e3, 300e3));
            dipole_probe::Polarizability alpha = dipole_probe::lorentzian_polarizability(
                u(0.5, 3.0), u(1e-3, 0.1), u(1e-4, 0.1));
            dipole_probe::ProbePair p =
                dipole_probe::eels_cl_dipole(beam, u(10.0, 200.0), alpha, u(0.5, 3.0));
            if (!(p.gamma_eels >= p.gamma_cl * (1.0 - 1e-12))) ordered = false;
        }
        double worst_eq = 0.0;
        for (double hw0 : {0.8, 1.5, 2.4}) {
            kinematics::ElectronBeam beam = kinematics::beam_from_kinetic_energy(1.2e5);
            dipole_probe::Polarizability alpha =
                dipole_probe::lorentzian_polarizability(hw0, 0.03, 0.0);
            dipole_probe::ProbePair p = dipole_probe::eels_cl_dipole(beam, 60.0, alpha, hw0);
            worst_eq = std::max(worst_eq, std::abs(p.gamma_eels / p.gamma_cl - 1.0));
        }
        dipole_probe::Polarizability alpha =
            dipole_probe::lorentzian_polarizability(1.4, 0.05, 0.02);
        double worst_ang = 0.0;
        for (double hw : {1.2, 1.5}) {
            double total = dipole_probe::eels_cl_dipole(b100, 45.0, alpha, hw).gamma_cl;
            double integral = oracles::integrate_sphere([&](double ct, double ph) {
                double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                std::array<double, 3> dir = {st * std::cos(ph), st * std::sin(ph), ct};
                return dipole_probe::cl_angular_dipole(b100, {1.0, 0.0}, 45.0, alpha, hw, dir);
            });
            worst_ang = std::max(worst_ang, std::abs(integral / total - 1.0));
        }
        bool ok = ordered && worst_eq < 1e-10 && worst_ang < 1e-6;
        report(12, ok,
               fmt("EELS >= CL %s on 1e3 draws; resonance equality %.2g (< 1e-10); angular %.2g (< 1e-6)",
                   ordered ? "holds" : "VIOLATED", worst_eq, worst_ang));
    }

    // 13. density-matrix grid: diagonal matches the comb temporal density to
    //     1e-6; trace/Hermiticity/purity preserved to 1e-10; revival at z_T
    {
        double zt = kinematics::talbot_distance(b100, 1.5);
        std::size_t n = 512;
        density_matrix::DensityMatrixGrid g0 = density_matrix::pure_uniform(n, 1.5, b100);
        density_matrix::DensityMatrixGrid g =
            density_matrix::apply_pinem(g0, cplx(3.0, 0.0), 0.0191 * zt);
        density_matrix::GridDiagnostics diag = density_matrix::diagnostics(g);
        pinem::PinemInteraction in = pinem::comb_amplitudes(cplx(3.0, 0.0), 1.5, b100, 0.0191 * zt);
        std::vector<double> dens = pinem::density_vs_time(in, (int)n);
        double worst_diag = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            worst_diag = std::max(
                worst_diag, std::abs(diag.diagonal[k] * g.period - dens[(n - k) % n]));
        double inv = std::max(std::abs(diag.trace - 1.0),
                              std::max(diag.hermiticity_error, std::abs(diag.purity - 1.0)));
        density_matrix::DensityMatrixGrid mod = density_matrix::apply_pinem(g0, cplx(2.0, 0.0), 0.0);
        density_matrix::DensityMatrixGrid rev = density_matrix::free_propagate(mod, zt);
        double worst_rev = 0.0;
        for (std::size_t i = 0; i < mod.n * mod.n; ++i)
            worst_rev = std::max(worst_rev, std::abs(rev.rho[i] - mod.rho[i]));
        bool ok = worst_diag < 1e-6 && inv < 1e-10 && worst_rev < 1e-10;
        report(13, ok,
               fmt("diagonal residual %.2g (< 1e-6); invariants %.2g (< 1e-10); revival %.2g (< 1e-10)",
                   worst_diag, inv, worst_rev));
    }

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all 13 criteria passed\n");
    return failures ? 1 : 0;
}
