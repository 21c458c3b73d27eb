#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("freebeam_cli_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    fs::path out = work_dir() / ("stdout" + std::to_string(counter) + ".txt");
    fs::path err = work_dir() / ("stderr" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = env_prefix + std::string(FREEBEAM_CLI_PATH) + " " + args + " >" +
                      out.string() + " 2>" + err.string();
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

struct Csv {
    std::vector<std::string> header;  // '#' lines
    std::vector<std::string> columns; // split first non-# line
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_rows;
};

Csv parse_csv(const std::string& text) {
    Csv c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            c.header.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cells.push_back(cur);
        if (c.columns.empty()) {
            c.columns = cells;
            continue;
        }
        std::vector<double> vals;
        vals.reserve(cells.size());
        for (const std::string& s : cells) vals.push_back(std::stod(s));
        c.rows.push_back(vals);
        c.raw_rows.push_back(line);
    }
    return c;
}

std::size_t column(const Csv& c, const std::string& name) {
    for (std::size_t i = 0; i < c.columns.size(); ++i)
        if (c.columns[i] == name) return i;
    FAIL("missing column " + name);
    return 0;
}

} // namespace

TEST_CASE("kinematics subcommand emits the beam row", "[cli]") {
    RunResult r = run_cli("kinematics --ek 100e3");
    REQUIRE(r.code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 1);
    CHECK(c.rows[0][column(c, "ek_ev")] == Catch::Approx(100000.0));
    CHECK(c.rows[0][column(c, "gamma")] == Catch::Approx(1.195695).epsilon(1e-5));
    CHECK(c.rows[0][column(c, "v_nm_fs")] == Catch::Approx(164.3525).epsilon(1e-5));
    CHECK(c.rows[0][column(c, "lambda_pm")] == Catch::Approx(3.7014).epsilon(1e-3));
    bool versioned = false;
    for (const std::string& h : c.header)
        if (h.find("freebeam") != std::string::npos) versioned = true;
    CHECK(versioned);
}

TEST_CASE("thermal subcommand reproduces the loss/gain ratio", "[cli]") {
    RunResult r = run_cli("thermal --hw-mev 50 --T 300 --stats bosonic");
    REQUIRE(r.code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 1);
    CHECK(c.rows[0][column(c, "loss_gain_ratio")] == Catch::Approx(6.9177).epsilon(1e-3));
}

TEST_CASE("scenario subcommand peaks at zero phase", "[cli]") {
    RunResult r = run_cli(
        "scenario --name fig5b --occupancy two-electron --s-param 0.8825 --phi 0:6.2832:256");
    REQUIRE(r.code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 256);
    std::size_t ratio_col = column(c, "ratio");
    double max_ratio = -1.0, at_phi = -1.0;
    for (const std::vector<double>& row : c.rows)
        if (row[ratio_col] > max_ratio) {
            max_ratio = row[ratio_col];
            at_phi = row[column(c, "phi_rad")];
        }
    CHECK(max_ratio == Catch::Approx(1.8825).epsilon(1e-9));
    CHECK(at_phi == 0.0);
}

TEST_CASE("multicolor subcommand emits asymmetric sidebands", "[cli]") {
    RunResult r = run_cli("multicolor --beta 0.8@1 --beta 0.4@2 --l-max 40");
    REQUIRE(r.code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 81);
    std::size_t lc = column(c, "l"), pc = column(c, "population");
    double p_plus = 0.0, p_minus = 0.0;
    for (const std::vector<double>& row : c.rows) {
        if (row[lc] == 1.0) p_plus = row[pc];
        if (row[lc] == -1.0) p_minus = row[pc];
    }
    CHECK(p_plus == Catch::Approx(0.50974).margin(2e-4));
    CHECK(p_minus == Catch::Approx(0.05760).margin(2e-4));
}

TEST_CASE("emitted config replays to byte-identical data rows", "[cli]") {
    fs::path cfg = work_dir() / "replay.json";
    fs::path a = work_dir() / "a.csv";
    fs::path b = work_dir() / "b.csv";
    RunResult r1 = run_cli("pinem-comb --beta-abs 1.3 --beta-arg 0.4 --d-nm 1.7e6 --emit-config " +
                           cfg.string() + " --out " + a.string());
    REQUIRE(r1.code == 0);
    RunResult r2 = run_cli("pinem-comb --config " + cfg.string() + " --out " + b.string());
    REQUIRE(r2.code == 0);
    Csv ca = parse_csv(slurp(a));
    Csv cb = parse_csv(slurp(b));
    REQUIRE(!ca.raw_rows.empty());
    REQUIRE(ca.raw_rows == cb.raw_rows);

    // flags override config values
    RunResult r3 = run_cli("pinem-comb --config " + cfg.string() + " --beta-abs 0.2");
    REQUIRE(r3.code == 0);
    Csv cc = parse_csv(r3.out);
    REQUIRE(cc.raw_rows != ca.raw_rows);
}

TEST_CASE("thread cap does not change the bytes", "[cli]") {
    fs::path a = work_dir() / "threads1.csv";
    fs::path b = work_dir() / "threads3.csv";
    std::string args = "eels-dipole --ek 100e3 --hw-ev 1.0:2.0:64 --r-nm 40 --hw0-ev 1.5 "
                       "--gamma-r-ev 0.04 --gamma-nr-ev 0.01 --out ";
    REQUIRE(run_cli(args + a.string(), "FREEBEAM_THREADS=1 ").code == 0);
    REQUIRE(run_cli(args + b.string(), "FREEBEAM_THREADS=3 ").code == 0);
    REQUIRE(slurp(a) == slurp(b));
    REQUIRE(!slurp(a).empty());
}

TEST_CASE("rho subcommand reports a pure modulated state", "[cli]") {
    RunResult r = run_cli("rho --n 64 --beta-abs 1.2 --d-nm 0");
    REQUIRE(r.code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 64);
    double purity = -1.0;
    for (const std::string& h : c.header) {
        std::size_t at = h.find("purity=");
        if (at != std::string::npos) purity = std::stod(h.substr(at + 7));
    }
    CHECK(purity == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exit codes separate usage from contract failures", "[cli]") {
    CHECK(run_cli("bogus-subcommand").code == 1);
    CHECK(run_cli("kinematics --no-such-flag 1").code == 1);
    CHECK(run_cli("kinematics --ek 1:2:x").code == 1);        // malformed grid
    CHECK(run_cli("kinematics --ek=-5").code == 2);           // domain error
    CHECK(run_cli("kinematics --ek 0:10:1").code == 2);       // grid count < 2
    CHECK(run_cli("thermal --hw-mev=-1:1:5:log --T 300").code == 2); // log needs positive
    CHECK(run_cli("--version").code == 0);
    CHECK(run_cli("scenario --help").code == 0);
}
