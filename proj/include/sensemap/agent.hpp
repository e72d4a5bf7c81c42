#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sensemap/common.hpp"
#include "sensemap/csv.hpp"
#include "sensemap/world.hpp"

namespace sensemap {

// Two photoreceptors straddling a motor position, sampled over a fixed
// proprioceptive grid.
struct BodyModel {
  double receptor_half_gap = 0.05;
  double p_min = 0.0;
  double p_max = 1.0;
  double grid_step = 0.001;

  int grid_size() const {
    return static_cast<int>(std::llround((p_max - p_min) / grid_step)) + 1;
  }

  double grid_p(int i) const { return p_min + static_cast<double>(i) * grid_step; }

  void validate() const {
    if (!(receptor_half_gap > 0.0)) throw ConfigError("BodyModel: receptor_half_gap must be > 0");
    if (!(p_min < p_max)) throw ConfigError("BodyModel: need p_min < p_max");
    if (!(grid_step > 0.0)) throw ConfigError("BodyModel: grid_step must be > 0");
    const double steps = (p_max - p_min) / grid_step;
    if (std::abs(steps - std::llround(steps)) > 1e-9)
      throw ConfigError("BodyModel: grid_step must divide the proprioceptive span");
  }
};

struct ScanEntry {
  double p = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

struct Scan {
  std::vector<ScanEntry> entries;
  std::string environment_tag;
};

// Proprioception-to-position map. Monotone on [0,1] with derivative
// 1 + cos(4*pi*x), which vanishes exactly at x = 1/4 and x = 3/4.
inline double pmap(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pmap: x outside [0,1]");
  constexpr double k = 4.0 * std::numbers::pi;
  return x + std::sin(k * x) / k;
}

inline double pmap_deriv(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pmap_deriv: x outside [0,1]");
  return 1.0 + std::cos(4.0 * std::numbers::pi * x);
}

// Inverse by bisection. pmap is monotone non-decreasing, so this converges to
// machine precision; the flat points make the inverse locally steep but still
// well-defined.
inline double pmap_inv(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("pmap_inv: p outside [0,1]");
  double a = 0.0, b = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    if (pmap(m) < p) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

inline Scan scan(const Environment& env, const BodyModel& body) {
  body.validate();
  Scan out;
  const int n = body.grid_size();
  out.entries.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = body.grid_p(i);
    const double x = pmap_inv(p);
    ScanEntry e;
    e.p = p;
    e.s1 = luminance(env, x - body.receptor_half_gap);
    e.s2 = luminance(env, x + body.receptor_half_gap);
    out.entries.push_back(e);
  }
  return out;
}

// Oracle: exact proprioceptive consequence of a rigid shift d, defined only
// where the displaced position stays inside the body's workspace.
inline std::optional<double> ground_truth_phi(double d, double p) {
  const double x = pmap_inv(p);
  const double xn = x + d;
  if (xn < 0.0 || xn > 1.0) return std::nullopt;
  return pmap(xn);
}

inline std::string scan_to_csv(const Scan& s) {
  std::string out = "p,s1,s2\n";
  for (const auto& e : s.entries) {
    out += fmt17(e.p);
    out += ',';
    out += fmt17(e.s1);
    out += ',';
    out += fmt17(e.s2);
    out += '\n';
  }
  return out;
}

inline Scan scan_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "p,s1,s2")
    throw IoError("scan_from_csv: missing 'p,s1,s2' header");
  Scan s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 3) throw IoError("scan_from_csv: expected 3 columns");
    s.entries.push_back({parse_double(cells[0]), parse_double(cells[1]),
                         parse_double(cells[2])});
  }
  return s;
}

}  // namespace sensemap
