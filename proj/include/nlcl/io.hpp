#pragma once

// Artifact writers: norm-history CSV, extra series CSV, sweep CSV and the
// flat binary snapshot format.
//
// Snapshot layout (little-endian, as written by the host):
//   int32   dim
//   int32   N
//   float64 L
//   float64 t
//   float64 values[N^dim]   row-major, axis 0 slowest, x_j = -L/2 + j L/N

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/greens.hpp"
#include "nlcl/solver.hpp"

namespace nlcl::io {

/// Shortest round-trip decimal form.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::out) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, mode);
  if (!os) throw std::runtime_error("cannot open for writing: " + p.string());
  return os;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  auto os = open_out(p);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

/// Columns t, L1, L2, Linf, Hs2, Hdot_s, mean.
inline void write_norms_csv(const std::filesystem::path& p, const Trajectory& tr) {
  auto os = open_out(p);
  os << "t,L1,L2,Linf,Hs2,Hdot_s,mean\n";
  for (const auto& r : tr.norms)
    os << num(r.t) << ',' << num(r.L1) << ',' << num(r.L2) << ',' << num(r.Linf) << ',' << num(r.Hs2)
       << ',' << num(r.Hdot_s) << ',' << num(r.mean) << '\n';
}

/// `first` (default t) followed by named columns of equal length.
inline void write_series_csv(const std::filesystem::path& p, const std::vector<double>& times,
                             const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& columns,
                             const std::string& first = "t") {
  auto os = open_out(p);
  os << first;
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << num(times[i]);
    for (const auto& c : columns) os << ',' << (i < c.size() ? num(c[i]) : std::string());
    os << '\n';
  }
}

inline void write_sweep_csv(const std::filesystem::path& p, const std::vector<SweepRow>& rows) {
  auto os = open_out(p);
  os << "t,quantity,value,ratio\n";
  for (const auto& r : rows) os << num(r.t) << ',' << r.quantity << ',' << num(r.value) << ',' << num(r.ratio) << '\n';
}

inline void write_snapshot(const std::filesystem::path& p, const Field& f, double t) {
  auto os = open_out(p, std::ios::out | std::ios::binary);
  const std::int32_t dim = f.grid().dim();
  const std::int32_t n = static_cast<std::int32_t>(f.grid().points_per_dim());
  const double L = f.grid().extent();
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&L), sizeof L);
  os.write(reinterpret_cast<const char*>(&t), sizeof t);
  const auto v = f.values();
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

struct Snapshot {
  Field field;
  double t;
};

inline Snapshot read_snapshot(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot: " + p.string());
  std::int32_t dim = 0, n = 0;
  double L = 0.0, t = 0.0;
  is.read(reinterpret_cast<char*>(&dim), sizeof dim);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  is.read(reinterpret_cast<char*>(&t), sizeof t);
  if (!is) throw std::runtime_error("truncated snapshot header: " + p.string());
  const Grid g(dim, static_cast<std::size_t>(n), L);
  std::vector<double> v(g.size());
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated snapshot payload: " + p.string());
  return {Field(g, std::move(v)), t};
}

}  // namespace nlcl::io
