#pragma once

// CSV and binary serialization: numeric formatting at 12 significant
// digits, sampled-field CSV ingestion, and density-matrix grid round trips
// (CSV and packed little-endian binary).

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "density_matrix.hpp"
#include "errors.hpp"
#include "kinematics.hpp"
#include "pinem.hpp"

namespace freebeam::io {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string join_csv(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline bool parse_double(const std::string& s, double& v) {
    try {
        std::size_t pos = 0;
        v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline std::string header_value(const std::string& line, const std::string& key) {
    std::size_t at = line.find(key + "=");
    if (at == std::string::npos) return {};
    return line.substr(at + key.size() + 1);
}

} // namespace detail

// Columns: z_nm,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz.  Lines starting with '#'
// and a leading non-numeric header row are skipped.
inline pinem::SampledLineField read_field_csv(std::istream& in) {
    pinem::SampledLineField f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells = detail::split_csv(line);
        if (cells.size() != 7) throw contract_error("field CSV: expected 7 columns");
        std::array<double, 7> v{};
        bool ok = true;
        for (std::size_t i = 0; i < 7; ++i) ok = ok && detail::parse_double(cells[i], v[i]);
        if (!ok) {
            if (f.z.empty()) continue; // header row
            throw contract_error("field CSV: non-numeric cell");
        }
        f.z.push_back(v[0]);
        f.ex.emplace_back(v[1], v[2]);
        f.ey.emplace_back(v[3], v[4]);
        f.ez.emplace_back(v[5], v[6]);
    }
    f.validate();
    return f;
}

inline pinem::SampledLineField read_field_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw contract_error("field CSV: cannot open " + path);
    return read_field_csv(in);
}

inline void write_rho_csv(const density_matrix::DensityMatrixGrid& g, std::ostream& out) {
    out << "# freebeam-rho\n";
    out << "# n=" << g.n << "\n";
    out << "# period_nm=" << fmt_g(g.period) << "\n";
    out << "# photon_ev=" << fmt_g(g.photon_energy) << "\n";
    out << "# kinetic_ev=" << fmt_g(g.beam.kinetic_energy) << "\n";
    out << "i,j,re,im\n";
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            out << i << ',' << j << ',' << fmt_g(g.at(i, j).real()) << ','
                << fmt_g(g.at(i, j).imag()) << "\n";
}

inline density_matrix::DensityMatrixGrid read_rho_csv(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    double hw = 0.0, ek = 0.0;
    std::vector<std::array<double, 4>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string v;
            if (!(v = detail::header_value(line, "n")).empty()) n = (std::size_t)std::stoull(v);
            else if (!(v = detail::header_value(line, "photon_ev")).empty()) hw = std::stod(v);
            else if (!(v = detail::header_value(line, "kinetic_ev")).empty()) ek = std::stod(v);
            continue;
        }
        std::vector<std::string> cells = detail::split_csv(line);
        if (cells.size() != 4) throw contract_error("rho CSV: expected 4 columns");
        std::array<double, 4> v{};
        bool ok = true;
        for (std::size_t i = 0; i < 4; ++i) ok = ok && detail::parse_double(cells[i], v[i]);
        if (!ok) continue; // header row
        rows.push_back(v);
    }
    if (n == 0 || hw <= 0.0 || ek <= 0.0)
        throw contract_error("rho CSV: missing n/photon_ev/kinetic_ev header");
    if (rows.size() != n * n) throw contract_error("rho CSV: row count differs from n*n");
    density_matrix::DensityMatrixGrid g =
        density_matrix::pure_uniform(n, hw, kinematics::beam_from_kinetic_energy(ek));
    for (const std::array<double, 4>& r : rows) {
        std::size_t i = (std::size_t)r[0], j = (std::size_t)r[1];
        if (i >= n || j >= n) throw contract_error("rho CSV: index out of range");
        g.at(i, j) = {r[2], r[3]};
    }
    g.validate();
    return g;
}

// Packed layout: "FBRHO001", u64 n, f64 kinetic_ev, f64 photon_ev, then
// n*n (re, im) f64 pairs in row-major order, all little-endian.
inline void write_rho_binary(const density_matrix::DensityMatrixGrid& g,
                             const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw contract_error("rho binary: cannot open " + path);
    out.write("FBRHO001", 8);
    std::uint64_t n = g.n;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&g.beam.kinetic_energy), 8);
    out.write(reinterpret_cast<const char*>(&g.photon_energy), 8);
    out.write(reinterpret_cast<const char*>(g.rho.data()),
              (std::streamsize)(g.rho.size() * sizeof(std::complex<double>)));
    if (!out) throw contract_error("rho binary: write failed");
}

inline density_matrix::DensityMatrixGrid read_rho_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw contract_error("rho binary: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "FBRHO001", 8) != 0)
        throw contract_error("rho binary: bad magic");
    std::uint64_t n = 0;
    double ek = 0.0, hw = 0.0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&ek), 8);
    in.read(reinterpret_cast<char*>(&hw), 8);
    if (!in || n < 2 || n > (1u << 20)) throw contract_error("rho binary: bad header");
    density_matrix::DensityMatrixGrid g = density_matrix::pure_uniform(
        (std::size_t)n, hw, kinematics::beam_from_kinetic_energy(ek));
    in.read(reinterpret_cast<char*>(g.rho.data()),
            (std::streamsize)(g.rho.size() * sizeof(std::complex<double>)));
    if (!in) throw contract_error("rho binary: truncated data");
    g.validate();
    return g;
}

} // namespace freebeam::io
