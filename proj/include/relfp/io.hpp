#pragma once

// File outputs: CSV snapshots, a raw little-endian float64 block with a
// 64-byte header, diagnostic series, radial profiles and the run manifest.
// All floating-point text is written with %.17g so that identical runs
// produce bit-identical files.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "relfp/diagnostics.hpp"
#include "relfp/phase_grid.hpp"
#include "relfp/radial.hpp"

namespace relfp {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_snapshot_csv(const std::string& path, const DistributionField& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "x,p,f\n";
    for (int i = 0; i < f.grid.n_x; ++i)
        for (int j = 0; j < f.grid.n_p; ++j)
            out << format_double(f.grid.x_center(i)) << ',' << format_double(f.grid.p_center(j))
                << ',' << format_double(f.values(j, i)) << '\n';
}

// 64-byte header: magic "RELFP001", uint32 {dim, n_x, n_p, 0}, doubles
// {x_min, x_max, p_max, time}, zero padding. Payload: n_x * n_p float64
// values, x-major.
inline void write_snapshot_raw(const std::string& path, const DistributionField& f,
                               double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    char header[64] = {};
    std::memcpy(header, "RELFP001", 8);
    const std::uint32_t ints[4] = {static_cast<std::uint32_t>(PhaseGrid::dim),
                                   static_cast<std::uint32_t>(f.grid.n_x),
                                   static_cast<std::uint32_t>(f.grid.n_p), 0u};
    std::memcpy(header + 8, ints, sizeof(ints));
    const double doubles[4] = {f.grid.x_min, f.grid.x_max, f.grid.p_max, time};
    std::memcpy(header + 24, doubles, sizeof(doubles));
    out.write(header, sizeof(header));
    std::vector<double> row(f.grid.n_p);
    for (int i = 0; i < f.grid.n_x; ++i) {
        for (int j = 0; j < f.grid.n_p; ++j) row[j] = f.values(j, i);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

struct RawSnapshot {
    PhaseGrid grid;
    double time = 0.0;
    DistributionField field;
};

inline RawSnapshot read_snapshot_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char header[64];
    in.read(header, sizeof(header));
    if (in.gcount() != 64 || std::memcmp(header, "RELFP001", 8) != 0)
        throw std::runtime_error("not a RELFP001 raw snapshot: " + path);
    std::uint32_t ints[4];
    std::memcpy(ints, header + 8, sizeof(ints));
    double doubles[4];
    std::memcpy(doubles, header + 24, sizeof(doubles));
    RawSnapshot snap;
    snap.grid = PhaseGrid(static_cast<int>(ints[1]), static_cast<int>(ints[2]), doubles[0],
                          doubles[1], doubles[2]);
    snap.time = doubles[3];
    snap.field = DistributionField(snap.grid);
    std::vector<double> row(snap.grid.n_p);
    for (int i = 0; i < snap.grid.n_x; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw std::runtime_error("truncated raw snapshot: " + path);
        for (int j = 0; j < snap.grid.n_p; ++j) snap.field.values(j, i) = row[j];
    }
    return snap;
}

inline void write_diagnostics_csv(const std::string& path, const DiagnosticSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,mass,Q,Qplus,dissipation,chi2,support_radius\n";
    for (const auto& r : series.records)
        out << format_double(r.t) << ',' << format_double(r.mass) << ','
            << format_double(r.free_energy) << ',' << format_double(r.free_energy_plus) << ','
            << format_double(r.dissipation) << ',' << format_double(r.chi2) << ','
            << format_double(r.support_radius) << '\n';
}

inline void write_radial_profile_csv(const std::string& path, const std::string& field_name,
                                     const RadialField& field, const RadialField& rho) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "r," << field_name << ",rho\n";
    for (int k = 0; k < field.grid.n_r; ++k)
        out << format_double(field.grid.r(k)) << ',' << format_double(field.values[k]) << ','
            << format_double(rho.values[k]) << '\n';
}

inline void write_convergence_csv(const std::string& path, const std::vector<double>& updates,
                                  const std::vector<double>& ratios) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "iter,residual,ratio\n";
    for (size_t k = 0; k < updates.size(); ++k)
        out << k + 1 << ',' << format_double(updates[k]) << ','
            << (k == 0 ? "" : format_double(ratios[k - 1])) << '\n';
}

inline std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace relfp
