#pragma once

// Helpers shared across test binaries: analytic oracles, break detection for
// interruption analysis, and small statistics over runs.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sensemap/runner.hpp"

namespace testutil {

using namespace sensemap;

struct Break {
  double p_lo = 0.0, p_hi = 0.0;
  double pp_lo = 0.0, pp_hi = 0.0;
};

// Consecutive-pair jumps of at least min_gap in either coordinate.
inline std::vector<Break> phi_breaks(const PhiFunction& phi, double min_gap = 0.01) {
  std::vector<Break> out;
  for (std::size_t i = 0; i + 1 < phi.pairs.size(); ++i) {
    const double dp = phi.pairs[i + 1].p - phi.pairs[i].p;
    const double dpp = phi.pairs[i + 1].p_prime - phi.pairs[i].p_prime;
    if (std::max(dp, std::abs(dpp)) >= min_gap)
      out.push_back({phi.pairs[i].p, phi.pairs[i + 1].p, phi.pairs[i].p_prime,
                     phi.pairs[i + 1].p_prime});
  }
  return out;
}

// True when some break's p-interval or p_prime-interval touches [c-w, c+w].
inline bool break_near(const std::vector<Break>& breaks, double c, double w = 0.05) {
  for (const auto& b : breaks) {
    if (b.p_hi >= c - w && b.p_lo <= c + w) return true;
    const double lo = std::min(b.pp_lo, b.pp_hi);
    const double hi = std::max(b.pp_lo, b.pp_hi);
    if (hi >= c - w && lo <= c + w) return true;
  }
  return false;
}

// Fraction of pairs within tol of the analytic ground truth; pairs where the
// ground truth is undefined count against the agreement.
inline double oracle_agreement(const PhiFunction& phi, double d, double tol = 0.005) {
  if (phi.pairs.empty()) return 0.0;
  std::size_t agree = 0;
  for (const auto& pr : phi.pairs) {
    const auto gt = ground_truth_phi(d, pr.p);
    if (gt && std::abs(pr.p_prime - *gt) <= tol) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(phi.pairs.size());
}

// Synthetic catalogue holding the exact phi graph of every quantized
// displacement, sampled on the scanning grid.
inline PhiCatalogue oracle_catalogue(double quantum = 0.01, int k_max = 95,
                                     double grid_step = 0.001) {
  PhiCatalogue cat;
  int id = 0;
  const int n = static_cast<int>(std::llround(1.0 / grid_step)) + 1;
  for (int k = -k_max; k <= k_max; ++k) {
    if (k == 0) continue;
    const double d = k * quantum;
    PhiFunction phi;
    phi.episode_id = id++;
    phi.true_d = d;
    for (int i = 0; i < n; ++i) {
      const double p = i * grid_step;
      const auto gt = ground_truth_phi(d, p);
      if (gt) phi.pairs.push_back({p, *gt});
    }
    if (phi.pairs.size() < 2) continue;
    phi.norm = phi_norm(phi);
    cat.items.push_back(std::move(phi));
  }
  return cat;
}

// Extraction for one isolated displacement from a base environment.
inline std::optional<PhiFunction> extract_for(const Environment& env, double d,
                                              int episode_id, const BodyModel& body,
                                              double match_tol_rel = 0.002) {
  const Scan before = scan(env, body);
  const Scan after = scan(shift_environment(env, d), body);
  auto phi = match_coincidences(before, after, episode_id, match_tol_rel);
  if (phi) phi->true_d = d;
  return phi;
}

// Complete noiseless matrix of a straight line over sample_grid(step).
inline DistanceMatrix line_matrix(double step) {
  DistanceMatrix m;
  m.sample = sample_grid(step);
  m.step = step;
  const int n = m.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  m.mask.assign(n, std::vector<char>(n, 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.values[i][j] = std::abs(m.sample[i] - m.sample[j]);
  return m;
}

inline double defined_fraction(const DistanceMatrix& m) {
  long long defined = 0, total = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int j = i + 1; j < m.size(); ++j) {
      ++total;
      if (m.defined(i, j)) ++defined;
    }
  return total ? static_cast<double>(defined) / static_cast<double>(total) : 0.0;
}

inline double monotone_fraction(const std::vector<double>& v) {
  if (v.size() < 2) return 1.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] >= v[i]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(v.size() - 1);
}

inline bool trace_non_increasing(const std::vector<double>& trace, double eps = 1e-12) {
  for (std::size_t i = 0; i + 1 < trace.size(); ++i)
    if (trace[i + 1] > trace[i] + eps) return false;
  return true;
}

// Rich environments derived from the shipped default configuration.
inline const Environment& default_environment() {
  static const Environment env = [] {
    const ExperimentConfig cfg;
    const BodyModel body;
    return generate_rich_environment(cfg.seed, cfg, body).first;
  }();
  return env;
}

inline const Environment& second_environment() {
  static const Environment env = [] {
    const ExperimentConfig cfg;
    const BodyModel body;
    return generate_rich_environment(cfg.seed ^ kEnvStride, cfg, body).first;
  }();
  return env;
}

}  // namespace testutil
