#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/stencils.hpp"

namespace blowup {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest exact decimal form of a double; %.17g round-trips bit-exactly,
// which the determinism guarantees lean on.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str()) throw IoError("cannot parse number: '" + tmp + "'");
  return v;
}

// FNV-1a, 64-bit; used to fingerprint sweep specs and CSV payloads.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

// One snapshot as CSV: a comment line with the time, then x,u,v,uxx rows.
inline std::string snapshot_csv(const FieldState<double>& s, const Grid<double>& g) {
  const Vec<double> uxx = d2(s.u, g);
  std::string out = "# t=" + fmt_g17(s.t) + "\nx,u,v,uxx\n";
  for (Index i = 0; i < g.n_points; ++i) {
    out += fmt_g17(g.coord(i));
    out += ',';
    out += fmt_g17(s.u[i]);
    out += ',';
    out += fmt_g17(s.v[i]);
    out += ',';
    out += fmt_g17(uxx[i]);
    out += '\n';
  }
  return out;
}

inline void write_snapshot_csv(const std::filesystem::path& path, const FieldState<double>& s,
                               const Grid<double>& g) {
  write_text_file(path, snapshot_csv(s, g));
}

struct SnapshotCsv {
  double t = 0;
  std::vector<double> x, u, v, uxx;
};

inline SnapshotCsv read_snapshot_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  SnapshotCsv snap;
  if (!std::getline(in, line) || line.rfind("# t=", 0) != 0)
    throw IoError("snapshot csv missing '# t=' header: " + path.string());
  snap.t = parse_double(std::string_view(line).substr(4));
  if (!std::getline(in, line) || line != "x,u,v,uxx")
    throw IoError("snapshot csv missing column header: " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 4> vals{};
    std::size_t pos = 0;
    for (int c = 0; c < 4; ++c) {
      const std::size_t next = c < 3 ? line.find(',', pos) : line.size();
      if (next == std::string::npos) throw IoError("snapshot csv short row: " + path.string());
      vals[c] = parse_double(std::string_view(line).substr(pos, next - pos));
      pos = next + 1;
    }
    snap.x.push_back(vals[0]);
    snap.u.push_back(vals[1]);
    snap.v.push_back(vals[2]);
    snap.uxx.push_back(vals[3]);
  }
  if (snap.x.empty()) throw IoError("snapshot csv has no rows: " + path.string());
  return snap;
}

}  // namespace blowup
