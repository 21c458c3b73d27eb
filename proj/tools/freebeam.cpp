// freebeam: CSV front end for the electron-beam photonics library.
//
// One subcommand per physics module, config-driven sweeps, deterministic
// output: `#` header lines record the effective inputs and the artifact
// version, data rows carry 12 significant digits, LF line endings.
// Exit codes: 0 success, 1 usage error, 2 contract/domain error.

#include <algorithm>
#include <array>
#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <freebeam/freebeam.hpp>

namespace fb = freebeam;
using cplx = std::complex<double>;
using json = nlohmann::json;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "start:stop:count[:linear|log]" or a single number
std::vector<double> parse_grid(const std::string& spec) {
    if (spec.find(':') == std::string::npos) {
        double v = 0.0;
        if (!fb::io::detail::parse_double(spec, v))
            throw usage_error("bad numeric value: " + spec);
        return {v};
    }
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3 && parts.size() != 4)
        throw usage_error("grid spec must be start:stop:count[:scale]: " + spec);
    double start = 0.0, stop = 0.0;
    if (!fb::io::detail::parse_double(parts[0], start) ||
        !fb::io::detail::parse_double(parts[1], stop))
        throw usage_error("bad grid endpoints: " + spec);
    long count = 0;
    try {
        std::size_t pos = 0;
        count = std::stol(parts[2], &pos);
        if (pos != parts[2].size()) throw usage_error("");
    } catch (...) {
        throw usage_error("bad grid count: " + spec);
    }
    std::string scale = parts.size() == 4 ? parts[3] : "linear";
    if (scale != "linear" && scale != "log")
        throw usage_error("grid scale must be linear or log: " + spec);
    if (count < 2) throw fb::contract_error("grid count must be >= 2: " + spec);
    if (scale == "log" && (start <= 0.0 || stop <= 0.0))
        throw fb::contract_error("log grid requires positive endpoints: " + spec);
    std::vector<double> out((std::size_t)count);
    for (long i = 0; i < count; ++i) {
        double t = (double)i / (double)(count - 1);
        out[(std::size_t)i] = scale == "linear"
                                  ? start + (stop - start) * t
                                  : std::exp(std::log(start) + (std::log(stop) - std::log(start)) * t);
    }
    return out;
}

std::size_t thread_cap() {
    if (const char* s = std::getenv("FREEBEAM_THREADS")) {
        long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return (std::size_t)v;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

// Index-parallel evaluation into preassigned slots; output order is fixed
// by the caller, so the cap only affects wall time.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    std::size_t t = std::min(thread_cap(), n);
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t k = 0; k < t; ++k)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Effective inputs: ordered key/value log shared by the CSV header and the
// emitted replay config.
struct InputLog {
    std::vector<std::pair<std::string, json>> items;

    void add(const std::string& k, const json& v) { items.emplace_back(k, v); }

    std::string display(const json& v) const {
        if (v.is_number_float()) return fb::io::fmt_g(v.get<double>());
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    }

    void write_header(std::ostream& out, const std::string& command) const {
        out << "# freebeam " << fb::version << "\n";
        out << "# command=" << command << "\n";
        std::vector<std::pair<std::string, json>> sorted = items;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [k, v] : sorted) out << "# " << k << "=" << display(v) << "\n";
    }

    void emit_config(const std::string& path, const std::string& command) const {
        json j;
        j["_command"] = command;
        for (const auto& [k, v] : items) {
            if (j.contains(k)) {
                if (!j[k].is_array()) j[k] = json::array({j[k]});
                j[k].push_back(v);
            } else {
                j[k] = v;
            }
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw fb::contract_error("cannot open config output: " + path);
        out << j.dump(2) << "\n";
    }
};

// Flat JSON config merge: flags given on the command line win; config
// entries are appended as extra flags for the subcommand parser.
std::vector<std::string> merge_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw fb::contract_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw fb::contract_error(std::string("config parse: ") + e.what());
    }
    if (!j.is_object()) throw fb::contract_error("config must be a flat JSON object");
    std::vector<std::string> given;
    for (const std::string& a : args)
        if (a.rfind("--", 0) == 0) given.push_back(a.substr(0, a.find('=')));
    for (const auto& [k, v] : j.items()) {
        if (!k.empty() && k[0] == '_') continue;
        std::string flag = "--" + k;
        if (std::find(given.begin(), given.end(), flag) != given.end()) continue;
        auto push_value = [&](const json& e) {
            args.push_back(flag);
            args.push_back(e.is_string() ? e.get<std::string>() : e.dump());
        };
        if (v.is_array())
            for (const json& e : v) push_value(e);
        else if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back(flag);
        } else
            push_value(v);
    }
    return args;
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);
        if (!file) throw fb::contract_error("cannot open output: " + path);
        stream = &file;
    }
};

std::string row(const std::vector<double>& vals) {
    std::string line;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) line += ',';
        line += fb::io::fmt_g(vals[i]);
    }
    return line;
}

cplx polar_input(double abs, double arg) { return std::polar(abs, arg); }

fb::pinem::MulticolorFactor parse_color(const std::string& spec) {
    std::size_t at = spec.find('@');
    if (at == std::string::npos || at + 1 == spec.size())
        throw usage_error("color spec must be abs[,arg]@harmonic: " + spec);
    std::string left = spec.substr(0, at), right = spec.substr(at + 1);
    double babs = 0.0, barg = 0.0;
    std::size_t comma = left.find(',');
    bool ok = comma == std::string::npos
                  ? fb::io::detail::parse_double(left, babs)
                  : fb::io::detail::parse_double(left.substr(0, comma), babs) &&
                        fb::io::detail::parse_double(left.substr(comma + 1), barg);
    long harmonic = 0;
    try {
        std::size_t pos = 0;
        harmonic = std::stol(right, &pos);
        if (pos != right.size()) ok = false;
    } catch (...) {
        ok = false;
    }
    if (!ok) throw usage_error("color spec must be abs[,arg]@harmonic: " + spec);
    return {polar_input(babs, barg), (int)harmonic};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-form electron-beam photonics: kinematics, dipolar EELS/CL, "
                 "sideband combs, coherence, wavepacket trains, density matrices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fb::version));

    std::string config_path, emit_path, out_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat JSON config; flags override");
        sub->add_option("--emit-config", emit_path, "write the effective config as JSON");
        sub->add_option("--out", out_path, "output CSV path (default stdout)");
    };

    // kinematics
    std::string kin_ek = "100e3";
    double kin_hw = 0.0;
    CLI::App* kin = app.add_subcommand("kinematics", "relativistic beam parameters");
    kin->add_option("--ek", kin_ek, "kinetic energy, eV (number or grid)")->required();
    kin->add_option("--hw-ev", kin_hw, "photon energy, eV: adds revival/threshold/mode columns");
    add_common(kin);

    // eels-dipole
    double ed_ek = 1e5, ed_r = 50.0, ed_hw0 = 1.5, ed_gr = 0.04, ed_gnr = 0.0;
    std::string ed_hw = "1.5";
    CLI::App* ed = app.add_subcommand("eels-dipole", "dipolar EELS and CL spectra");
    ed->add_option("--ek", ed_ek, "kinetic energy, eV");
    ed->add_option("--hw-ev", ed_hw, "photon energy, eV (number or grid)")->required();
    ed->add_option("--r-nm", ed_r, "impact parameter, nm")->required();
    ed->add_option("--hw0-ev", ed_hw0, "resonance energy, eV")->required();
    ed->add_option("--gamma-r-ev", ed_gr, "radiative width, eV")->required();
    ed->add_option("--gamma-nr-ev", ed_gnr, "nonradiative width, eV");
    add_common(ed);

    // cl-angular
    double ca_ek = 1e5, ca_hw = 1.5, ca_r = 50.0, ca_hw0 = 1.5, ca_gr = 0.04, ca_gnr = 0.0,
           ca_phi_az = 0.0;
    std::string ca_theta = "0:3.141592653589793:181";
    CLI::App* ca = app.add_subcommand("cl-angular", "angle-resolved CL emission");
    ca->add_option("--ek", ca_ek, "kinetic energy, eV");
    ca->add_option("--hw-ev", ca_hw, "photon energy, eV")->required();
    ca->add_option("--r-nm", ca_r, "impact parameter, nm")->required();
    ca->add_option("--hw0-ev", ca_hw0, "resonance energy, eV")->required();
    ca->add_option("--gamma-r-ev", ca_gr, "radiative width, eV")->required();
    ca->add_option("--gamma-nr-ev", ca_gnr, "nonradiative width, eV");
    ca->add_option("--theta", ca_theta, "polar angle grid, rad");
    ca->add_option("--phi-az", ca_phi_az, "azimuthal angle, rad");
    add_common(ca);

    // thermal
    std::string th_hw = "50", th_stats = "bosonic";
    double th_t = 300.0, th_g0 = 1.0;
    CLI::App* th = app.add_subcommand("thermal", "finite-temperature loss/gain scaling");
    th->add_option("--hw-mev", th_hw, "photon energy, meV (number or grid)")->required();
    th->add_option("--T", th_t, "temperature, K")->required();
    th->add_option("--stats", th_stats, "bosonic|fermionic")
        ->check(CLI::IsMember({"bosonic", "fermionic"}));
    th->add_option("--gamma0", th_g0, "zero-temperature probability");
    add_common(th);

    // pinem-comb
    double pc_babs = 1.0, pc_barg = 0.0, pc_ek = 1e5, pc_hw = 1.5, pc_d = 0.0;
    int pc_lmax = 0;
    CLI::App* pc = app.add_subcommand("pinem-comb", "sideband amplitudes after propagation");
    pc->add_option("--beta-abs", pc_babs, "|beta|")->required();
    pc->add_option("--beta-arg", pc_barg, "arg beta, rad");
    pc->add_option("--ek", pc_ek, "kinetic energy, eV");
    pc->add_option("--hw-ev", pc_hw, "photon energy, eV");
    pc->add_option("--d-nm", pc_d, "propagation distance, nm");
    pc->add_option("--l-max", pc_lmax, "truncation order (<= 0: automatic)");
    add_common(pc);

    // pinem-density
    double pd_babs = 1.0, pd_barg = 0.0, pd_ek = 1e5, pd_hw = 1.5;
    std::string pd_d = "0";
    int pd_ntau = 256;
    CLI::App* pd = app.add_subcommand("pinem-density", "temporal density over one period");
    pd->add_option("--beta-abs", pd_babs, "|beta|")->required();
    pd->add_option("--beta-arg", pd_barg, "arg beta, rad");
    pd->add_option("--ek", pd_ek, "kinetic energy, eV");
    pd->add_option("--hw-ev", pd_hw, "photon energy, eV");
    pd->add_option("--d-nm", pd_d, "propagation distance, nm (number or grid)");
    pd->add_option("--n-tau", pd_ntau, "samples per period");
    add_common(pd);

    // multicolor
    std::vector<std::string> mc_betas;
    int mc_lmax = 40;
    CLI::App* mc = app.add_subcommand("multicolor", "ladder populations from several colors");
    mc->add_option("--beta", mc_betas, "coupling abs[,arg]@harmonic (repeatable)")->required();
    mc->add_option("--l-max", mc_lmax, "ladder truncation");
    add_common(mc);

    // coherence
    int co_m = 1;
    std::string co_babs = "0.05:2:40", co_d = "0";
    double co_ek = 1e5, co_hw = 1.5;
    CLI::App* co = app.add_subcommand("coherence", "harmonic coherence factor of a comb");
    co->add_option("--m", co_m, "harmonic index >= 0");
    co->add_option("--beta-abs", co_babs, "|beta| (number or grid)");
    co->add_option("--d-nm", co_d, "propagation distance, nm (number or grid)");
    co->add_option("--ek", co_ek, "kinetic energy, eV");
    co->add_option("--hw-ev", co_hw, "photon energy, eV");
    add_common(co);

    // superradiance
    std::string sr_n = "2:100:99";
    double sr_g0 = 1.0, sr_qabs = 1.0, sr_qarg = 0.0, sr_mabs = 1.0, sr_marg = 0.0;
    CLI::App* sr = app.add_subcommand("superradiance", "N-electron excitation totals");
    sr->add_option("--n", sr_n, "electron count (number or grid; rounded)");
    sr->add_option("--gamma0", sr_g0, "single-electron probability");
    sr->add_option("--q-abs", sr_qabs, "|Q|");
    sr->add_option("--q-arg", sr_qarg, "arg Q, rad");
    sr->add_option("--m-abs", sr_mabs, "|M|")->required();
    sr->add_option("--m-arg", sr_marg, "arg M, rad");
    add_common(sr);

    // optimize-m
    int om_m = 1;
    double om_ek = 1e5, om_hw = 1.5, om_blo = 0.05, om_bhi = 2.0, om_dlo = 0.0, om_dhi = -1.0;
    CLI::App* om = app.add_subcommand("optimize-m", "maximize |M_m|^2 over beta and d");
    om->add_option("--m", om_m, "harmonic index >= 1");
    om->add_option("--ek", om_ek, "kinetic energy, eV");
    om->add_option("--hw-ev", om_hw, "photon energy, eV");
    om->add_option("--beta-lo", om_blo, "lower |beta|");
    om->add_option("--beta-hi", om_bhi, "upper |beta|");
    om->add_option("--d-lo-nm", om_dlo, "lower distance, nm");
    om->add_option("--d-hi-nm", om_dhi, "upper distance, nm (< 0: 0.3 revival distances)");
    add_common(om);

    // scenario
    std::string sc_name = "fig5b", sc_occ = "one-per-packet", sc_phi = "0:6.2832:256";
    double sc_s = 0.8825, sc_kb = 0.0, sc_ek = 1e5, sc_hw = 1.5;
    CLI::App* sc = app.add_subcommand("scenario", "two-electron interference curves");
    sc->add_option("--name", sc_name, "fig5b|fig5c|fig6")
        ->check(CLI::IsMember({"fig5b", "fig5c", "fig6"}));
    sc->add_option("--occupancy", sc_occ, "one-per-packet|two-electron|shared")
        ->check(CLI::IsMember({"one-per-packet", "two-electron", "shared"}));
    sc->add_option("--s-param", sc_s, "elastic suppression S in (0, 1]")->required();
    sc->add_option("--phi", sc_phi, "phase grid, rad");
    sc->add_option("--kb", sc_kb, "mode-propagation phase k.b, rad");
    sc->add_option("--ek", sc_ek, "kinetic energy, eV (abscissa conversion)");
    sc->add_option("--hw-ev", sc_hw, "photon energy, eV (abscissa conversion)");
    add_common(sc);

    // train
    long tr_n = 2, tr_l = 2;
    double tr_s = 0.8825;
    std::string tr_phi = "0:6.2832:256";
    CLI::App* tr = app.add_subcommand("train", "periodic (N, L) train excitation ratio");
    tr->add_option("--n", tr_n, "electron count")->required();
    tr->add_option("--l", tr_l, "packets per electron")->required();
    tr->add_option("--s-param", tr_s, "elastic suppression S in (0, 1]")->required();
    tr->add_option("--phi", tr_phi, "phase grid, rad");
    add_common(tr);

    // rho
    std::size_t rh_n = 512;
    double rh_ek = 1e5, rh_hw = 1.5, rh_babs = 0.0, rh_barg = 0.0, rh_d = 0.0;
    bool rh_matrix = false;
    std::string rh_in_bin, rh_out_bin;
    CLI::App* rh = app.add_subcommand("rho", "density-matrix grid transforms");
    rh->add_option("--n", rh_n, "grid size (power of two)");
    rh->add_option("--ek", rh_ek, "kinetic energy, eV");
    rh->add_option("--hw-ev", rh_hw, "photon energy, eV");
    rh->add_option("--beta-abs", rh_babs, "|beta| of the phase imprint");
    rh->add_option("--beta-arg", rh_barg, "arg beta, rad");
    rh->add_option("--d-nm", rh_d, "propagation distance, nm");
    rh->add_flag("--matrix", rh_matrix, "emit the full matrix instead of the diagonal");
    rh->add_option("--in-bin", rh_in_bin, "load the starting state from packed binary");
    rh->add_option("--out-bin", rh_out_bin, "also save the final state as packed binary");
    add_common(rh);

    std::vector<std::string> args;
    try {
        args = merge_config(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "freebeam: " << e.what() << "\n";
        return 2;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        OutputTarget target;
        target.open(out_path);
        std::ostream& out = *target.stream;
        InputLog log;
        std::string command;
        std::vector<std::string> rows;
        std::string columns;

        if (kin->parsed()) {
            command = "kinematics";
            log.add("ek", kin_ek);
            bool with_hw = kin->count("--hw-ev") > 0;
            if (with_hw) log.add("hw-ev", kin_hw);
            std::vector<double> eks = parse_grid(kin_ek);
            columns = "ek_ev,gamma,beta,v_nm_fs,lambda_pm";
            if (with_hw) columns += ",talbot_nm,threshold_v_per_m,period_fs,spacing_nm";
            for (double ek : eks) {
                fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(ek);
                std::vector<double> vals = {ek, b.gamma, b.beta, b.velocity, b.wavelength};
                if (with_hw) {
                    fb::kinematics::ModePeriodSpacing ms =
                        fb::kinematics::mode_period_spacing(b, kin_hw);
                    vals.push_back(fb::kinematics::talbot_distance(b, kin_hw));
                    vals.push_back(fb::kinematics::threshold_field(b, kin_hw));
                    vals.push_back(ms.period);
                    vals.push_back(ms.spacing);
                }
                rows.push_back(row(vals));
            }
        } else if (ed->parsed()) {
            command = "eels-dipole";
            log.add("ek", ed_ek);
            log.add("hw-ev", ed_hw);
            log.add("r-nm", ed_r);
            log.add("hw0-ev", ed_hw0);
            log.add("gamma-r-ev", ed_gr);
            log.add("gamma-nr-ev", ed_gnr);
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(ed_ek);
            fb::dipole_probe::Polarizability alpha =
                fb::dipole_probe::lorentzian_polarizability(ed_hw0, ed_gr, ed_gnr);
            std::vector<double> hws = parse_grid(ed_hw);
            columns = "hw_ev,gamma_eels_fs,gamma_cl_fs";
            rows.resize(hws.size());
            parallel_for(hws.size(), [&](std::size_t i) {
                fb::dipole_probe::ProbePair p =
                    fb::dipole_probe::eels_cl_dipole(b, ed_r, alpha, hws[i]);
                rows[i] = row({hws[i], p.gamma_eels, p.gamma_cl});
            });
        } else if (ca->parsed()) {
            command = "cl-angular";
            log.add("ek", ca_ek);
            log.add("hw-ev", ca_hw);
            log.add("r-nm", ca_r);
            log.add("hw0-ev", ca_hw0);
            log.add("gamma-r-ev", ca_gr);
            log.add("gamma-nr-ev", ca_gnr);
            log.add("theta", ca_theta);
            log.add("phi-az", ca_phi_az);
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(ca_ek);
            fb::dipole_probe::Polarizability alpha =
                fb::dipole_probe::lorentzian_polarizability(ca_hw0, ca_gr, ca_gnr);
            std::vector<double> thetas = parse_grid(ca_theta);
            columns = "theta_rad,dgamma_domega_dhw";
            rows.resize(thetas.size());
            parallel_for(thetas.size(), [&](std::size_t i) {
                double st = std::sin(thetas[i]), ct = std::cos(thetas[i]);
                std::array<double, 3> dir = {st * std::cos(ca_phi_az), st * std::sin(ca_phi_az),
                                             ct};
                double v = fb::dipole_probe::cl_angular_dipole(b, {1.0, 0.0}, ca_r, alpha, ca_hw,
                                                               dir);
                rows[i] = row({thetas[i], v});
            });
        } else if (th->parsed()) {
            command = "thermal";
            log.add("hw-mev", th_hw);
            log.add("T", th_t);
            log.add("stats", th_stats);
            log.add("gamma0", th_g0);
            fb::dipole_probe::Statistics stats = th_stats == "bosonic"
                                                     ? fb::dipole_probe::Statistics::bosonic
                                                     : fb::dipole_probe::Statistics::fermionic;
            std::vector<double> hws = parse_grid(th_hw);
            columns = "hw_mev,loss,gain,loss_gain_ratio";
            for (double hw_mev : hws) {
                double w = hw_mev * 1e-3 / fb::hbar_ev_fs;
                double loss = fb::dipole_probe::thermal_scale(th_g0, w, th_t, stats);
                double gain = fb::dipole_probe::thermal_scale(th_g0, -w, th_t, stats);
                rows.push_back(row({hw_mev, loss, gain, loss / gain}));
            }
        } else if (pc->parsed()) {
            command = "pinem-comb";
            log.add("beta-abs", pc_babs);
            log.add("beta-arg", pc_barg);
            log.add("ek", pc_ek);
            log.add("hw-ev", pc_hw);
            log.add("d-nm", pc_d);
            log.add("l-max", pc_lmax);
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(pc_ek);
            fb::pinem::PinemInteraction in = fb::pinem::comb_amplitudes(
                polar_input(pc_babs, pc_barg), pc_hw, b, pc_d, pc_lmax);
            columns = "l,re_c,im_c,population";
            for (int l = -in.l_max; l <= in.l_max; ++l) {
                cplx c = in.amplitude(l);
                rows.push_back(row({(double)l, c.real(), c.imag(), std::norm(c)}));
            }
        } else if (pd->parsed()) {
            command = "pinem-density";
            log.add("beta-abs", pd_babs);
            log.add("beta-arg", pd_barg);
            log.add("ek", pd_ek);
            log.add("hw-ev", pd_hw);
            log.add("d-nm", pd_d);
            log.add("n-tau", pd_ntau);
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(pd_ek);
            std::vector<double> ds = parse_grid(pd_d);
            double period_fs = 2.0 * fb::pi * fb::hbar_ev_fs / pd_hw;
            columns = "d_nm,tau_fs,density";
            std::vector<std::vector<double>> dens(ds.size());
            parallel_for(ds.size(), [&](std::size_t i) {
                fb::pinem::PinemInteraction in = fb::pinem::comb_amplitudes(
                    polar_input(pd_babs, pd_barg), pd_hw, b, ds[i]);
                dens[i] = fb::pinem::density_vs_time(in, pd_ntau);
            });
            for (std::size_t i = 0; i < ds.size(); ++i)
                for (int k = 0; k < pd_ntau; ++k)
                    rows.push_back(
                        row({ds[i], (double)k * period_fs / (double)pd_ntau, dens[i][(std::size_t)k]}));
        } else if (mc->parsed()) {
            command = "multicolor";
            for (const std::string& s : mc_betas) log.add("beta", s);
            log.add("l-max", mc_lmax);
            std::vector<fb::pinem::MulticolorFactor> factors;
            factors.reserve(mc_betas.size());
            for (const std::string& s : mc_betas) factors.push_back(parse_color(s));
            std::vector<double> p = fb::pinem::multicolor_populations(factors, mc_lmax);
            columns = "l,population";
            for (int l = -mc_lmax; l <= mc_lmax; ++l)
                rows.push_back(row({(double)l, p[(std::size_t)(l + mc_lmax)]}));
        } else if (co->parsed()) {
            command = "coherence";
            log.add("m", co_m);
            log.add("beta-abs", co_babs);
            log.add("d-nm", co_d);
            log.add("ek", co_ek);
            log.add("hw-ev", co_hw);
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(co_ek);
            std::vector<double> betas = parse_grid(co_babs);
            std::vector<double> ds = parse_grid(co_d);
            columns = "beta_abs,d_nm,re_m,im_m,m_abs,m_closed_abs";
            rows.resize(betas.size() * ds.size());
            parallel_for(rows.size(), [&](std::size_t i) {
                double beta = betas[i / ds.size()];
                double d = ds[i % ds.size()];
                fb::coherence::PinemCoherence pcn =
                    fb::coherence::coherence_M_pinem(cplx(beta, 0.0), d, co_m, co_hw, b);
                rows[i] = row({beta, d, pcn.m_direct.real(), pcn.m_direct.imag(),
                               std::abs(pcn.m_direct), pcn.m_closed_abs});
            });
        } else if (sr->parsed()) {
            command = "superradiance";
            log.add("n", sr_n);
            log.add("gamma0", sr_g0);
            log.add("q-abs", sr_qabs);
            log.add("q-arg", sr_qarg);
            log.add("m-abs", sr_mabs);
            log.add("m-arg", sr_marg);
            cplx q = polar_input(sr_qabs, sr_qarg);
            cplx m = polar_input(sr_mabs, sr_marg);
            columns = "n,total";
            for (double nf : parse_grid(sr_n)) {
                long n = std::lround(nf);
                rows.push_back(
                    row({(double)n, fb::coherence::superradiant_pinem_total(n, sr_g0, q, m)}));
            }
        } else if (om->parsed()) {
            command = "optimize-m";
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(om_ek);
            double zt = fb::kinematics::talbot_distance(b, om_hw);
            if (om_dhi < 0.0) om_dhi = 0.3 * zt;
            log.add("m", om_m);
            log.add("ek", om_ek);
            log.add("hw-ev", om_hw);
            log.add("beta-lo", om_blo);
            log.add("beta-hi", om_bhi);
            log.add("d-lo-nm", om_dlo);
            log.add("d-hi-nm", om_dhi);
            fb::coherence::OptimalComb best =
                fb::coherence::optimize_M(om_m, om_hw, b, om_blo, om_bhi, om_dlo, om_dhi);
            columns = "m,beta_abs,d_nm,d_over_revival,m2";
            rows.push_back(row({(double)om_m, best.beta_abs, best.d_nm, best.d_nm / zt, best.m2}));
        } else if (sc->parsed()) {
            command = "scenario";
            log.add("name", sc_name);
            log.add("occupancy", sc_occ);
            log.add("s-param", sc_s);
            log.add("phi", sc_phi);
            log.add("kb", sc_kb);
            log.add("ek", sc_ek);
            log.add("hw-ev", sc_hw);
            fb::wavepackets::Scenario scen = sc_name == "fig5b" ? fb::wavepackets::Scenario::fig5b
                                             : sc_name == "fig5c"
                                                 ? fb::wavepackets::Scenario::fig5c
                                                 : fb::wavepackets::Scenario::fig6;
            fb::wavepackets::Occupancy occ = sc_occ == "shared"
                                                 ? fb::wavepackets::Occupancy::shared
                                                 : fb::wavepackets::Occupancy::one_per_packet;
            std::vector<double> phis = parse_grid(sc_phi);
            fb::wavepackets::ScenarioCurve curve =
                fb::wavepackets::scenario_curves(scen, occ, sc_s, phis, sc_kb);
            fb::kinematics::ElectronBeam b = fb::kinematics::beam_from_kinetic_energy(sc_ek);
            double w = sc_hw / fb::hbar_ev_fs;
            columns = "phi_rad,a_nm,ratio";
            for (std::size_t i = 0; i < phis.size(); ++i)
                rows.push_back(row({phis[i], phis[i] * b.velocity / w, curve.ratio[i]}));
        } else if (tr->parsed()) {
            command = "train";
            log.add("n", (long)tr_n);
            log.add("l", (long)tr_l);
            log.add("s-param", tr_s);
            log.add("phi", tr_phi);
            std::vector<double> phis = parse_grid(tr_phi);
            fb::wavepackets::ScenarioCurve curve =
                fb::wavepackets::periodic_train_total(tr_n, tr_l, tr_s, phis);
            columns = "phi_rad,ratio";
            for (std::size_t i = 0; i < phis.size(); ++i)
                rows.push_back(row({phis[i], curve.ratio[i]}));
        } else if (rh->parsed()) {
            command = "rho";
            log.add("n", (std::uint64_t)rh_n);
            log.add("ek", rh_ek);
            log.add("hw-ev", rh_hw);
            log.add("beta-abs", rh_babs);
            log.add("beta-arg", rh_barg);
            log.add("d-nm", rh_d);
            log.add("matrix", rh_matrix);
            if (!rh_in_bin.empty()) log.add("in-bin", rh_in_bin);
            if (!rh_out_bin.empty()) log.add("out-bin", rh_out_bin);
            fb::density_matrix::DensityMatrixGrid g =
                rh_in_bin.empty()
                    ? fb::density_matrix::pure_uniform(
                          rh_n, rh_hw, fb::kinematics::beam_from_kinetic_energy(rh_ek))
                    : fb::io::read_rho_binary(rh_in_bin);
            if (rh_babs != 0.0 || rh_d != 0.0)
                g = fb::density_matrix::apply_pinem(g, polar_input(rh_babs, rh_barg), rh_d);
            if (!rh_out_bin.empty()) fb::io::write_rho_binary(g, rh_out_bin);
            fb::density_matrix::GridDiagnostics diag = fb::density_matrix::diagnostics(g);
            log.write_header(out, command);
            out << "# trace=" << fb::io::fmt_g(diag.trace) << "\n";
            out << "# purity=" << fb::io::fmt_g(diag.purity) << "\n";
            out << "# hermiticity_error=" << fb::io::fmt_g(diag.hermiticity_error) << "\n";
            if (rh_matrix) {
                fb::io::write_rho_csv(g, out);
            } else {
                out << "i,z_nm,density_per_nm\n";
                for (std::size_t i = 0; i < g.n; ++i)
                    out << row({(double)i, g.z(i), diag.diagonal[i]}) << "\n";
            }
            if (!emit_path.empty()) log.emit_config(emit_path, command);
            out.flush();
            return out ? 0 : 2;
        }

        log.write_header(out, command);
        out << columns << "\n";
        for (const std::string& r : rows) out << r << "\n";
        if (!emit_path.empty()) log.emit_config(emit_path, command);
        out.flush();
        return out ? 0 : 2;
    } catch (const usage_error& e) {
        std::cerr << "freebeam: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        // contract errors derive from invalid_argument
        std::cerr << "freebeam: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "freebeam: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "freebeam: " << e.what() << "\n";
        return 2;
    }
}
