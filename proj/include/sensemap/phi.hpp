#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensemap/agent.hpp"
#include "sensemap/common.hpp"
#include "sensemap/csv.hpp"

namespace sensemap {

struct PhiPair {
  double p = 0.0;        // proprioceptive point before the shift
  double p_prime = 0.0;  // matched point after the shift
};

// Partial function on proprioception extracted from one episode. Pairs are
// strictly increasing in both coordinates.
struct PhiFunction {
  std::vector<PhiPair> pairs;
  double norm = 0.0;
  int episode_id = 0;
  std::optional<double> true_d;  // oracle annotation, evaluation only
};

struct PhiCatalogue {
  std::vector<PhiFunction> items;
  double match_tol_rel = 0.002;
  double pair_lookup_eps = 0.005;
};

namespace detail {

inline void require_same_grid(const Scan& a, const Scan& b, const char* who) {
  if (a.entries.size() != b.entries.size())
    throw ContractError(std::string(who) + ": scans use different grids");
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    if (a.entries[i].p != b.entries[i].p)
      throw ContractError(std::string(who) + ": scans use different grids");
}

inline double max_excitation(const Scan& s) {
  double m = 0.0;
  for (const auto& e : s.entries) m = std::max(m, std::max(e.s1, e.s2));
  return m;
}

// Indices of one longest strictly increasing subsequence (patience sorting).
inline std::vector<int> longest_increasing_subsequence(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> tails;          // indices of smallest tail per length
  std::vector<int> prev(n, -1);
  std::vector<double> tail_vals;
  for (int i = 0; i < n; ++i) {
    const auto it = std::lower_bound(tail_vals.begin(), tail_vals.end(), v[i]);
    const int pos = static_cast<int>(it - tail_vals.begin());
    if (pos > 0) prev[i] = tails[pos - 1];
    if (it == tail_vals.end()) {
      tail_vals.push_back(v[i]);
      tails.push_back(i);
    } else {
      *it = v[i];
      tails[pos] = i;
    }
  }
  std::vector<int> out;
  if (tails.empty()) return out;
  for (int i = tails.back(); i != -1; i = prev[i]) out.push_back(i);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace detail

// True when the two scans differ noticeably anywhere on the grid.
inline bool detect_change(const Scan& before, const Scan& after,
                          double threshold = 0.05) {
  detail::require_same_grid(before, after, "detect_change");
  if (!(threshold > 0.0)) throw ConfigError("detect_change: threshold must be > 0");
  for (std::size_t i = 0; i < before.entries.size(); ++i) {
    if (std::abs(before.entries[i].s1 - after.entries[i].s1) > threshold) return true;
    if (std::abs(before.entries[i].s2 - after.entries[i].s2) > threshold) return true;
  }
  return false;
}

inline double phi_norm(const PhiFunction& phi) {
  if (phi.pairs.empty()) throw ContractError("phi_norm: empty pair set");
  double m = 0.0;
  for (const auto& pr : phi.pairs) m = std::max(m, std::abs(pr.p - pr.p_prime));
  return m;
}

// Pairs old grid points with their sensorily nearest new points, keeps only
// matches within a relative tolerance of the peak excitation, then prunes
// outliers down to one longest strictly increasing subsequence. Fewer than
// two surviving pairs means the episode taught us nothing.
inline std::optional<PhiFunction> match_coincidences(const Scan& before,
                                                     const Scan& after,
                                                     int episode_id,
                                                     double match_tol_rel = 0.002) {
  detail::require_same_grid(before, after, "match_coincidences");
  if (!(match_tol_rel > 0.0))
    throw ConfigError("match_coincidences: match_tol_rel must be > 0");
  const std::size_t n = before.entries.size();
  const double m_exc =
      std::max(detail::max_excitation(before), detail::max_excitation(after));
  const double tol = match_tol_rel * m_exc;
  const double tol2 = tol * tol;

  std::vector<double> a1(n), a2(n);
  for (std::size_t j = 0; j < n; ++j) {
    a1[j] = after.entries[j].s1;
    a2[j] = after.entries[j].s2;
  }

  std::vector<PhiPair> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const double b1 = before.entries[i].s1;
    const double b2 = before.entries[i].s2;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d1 = b1 - a1[j];
      const double d2 = b2 - a2[j];
      const double d = d1 * d1 + d2 * d2;
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (best <= tol2)
      candidates.push_back({before.entries[i].p, after.entries[best_j].p});
  }

  std::vector<double> primes;
  primes.reserve(candidates.size());
  for (const auto& c : candidates) primes.push_back(c.p_prime);
  const auto keep = detail::longest_increasing_subsequence(primes);
  if (keep.size() < 2) return std::nullopt;

  PhiFunction phi;
  phi.episode_id = episode_id;
  phi.pairs.reserve(keep.size());
  for (int idx : keep) phi.pairs.push_back(candidates[static_cast<std::size_t>(idx)]);
  phi.norm = phi_norm(phi);
  return phi;
}

// Environment richness: any two grid points whose world positions differ by
// more than min_separation must be distinguishable at the matching tolerance,
// otherwise tolerance matching aliases far-apart points.
inline bool is_rich(const Scan& s, double match_tol_rel = 0.002,
                    double min_separation = 0.05) {
  const std::size_t n = s.entries.size();
  const double tol = match_tol_rel * detail::max_excitation(s);
  const double tol2 = tol * tol;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = pmap_inv(s.entries[i].p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (xs[j] - xs[i] <= min_separation) continue;
      const double d1 = s.entries[i].s1 - s.entries[j].s1;
      const double d2 = s.entries[i].s2 - s.entries[j].s2;
      if (d1 * d1 + d2 * d2 <= tol2) return false;
    }
  }
  return true;
}

// Interpolated value of phi at p, or nullopt when no recorded pair lies
// within eps. Outside the recorded span the nearest end pair extends flatly.
inline std::optional<double> phi_eval(const PhiFunction& phi, double p, double eps) {
  if (phi.pairs.empty()) return std::nullopt;
  const auto it = std::lower_bound(
      phi.pairs.begin(), phi.pairs.end(), p,
      [](const PhiPair& pr, double v) { return pr.p < v; });
  bool near = false;
  if (it != phi.pairs.end() && it->p - p <= eps) near = true;
  if (it != phi.pairs.begin() && p - std::prev(it)->p <= eps) near = true;
  if (!near) return std::nullopt;
  if (it == phi.pairs.begin()) return it->p_prime;
  if (it == phi.pairs.end()) return std::prev(it)->p_prime;
  const PhiPair& lo = *std::prev(it);
  const PhiPair& hi = *it;
  const double t = (p - lo.p) / (hi.p - lo.p);
  return lo.p_prime + t * (hi.p_prime - lo.p_prime);
}

// Best catalogue entry mapping p1 near p2, or nullptr. Ties resolve by
// smaller residual, then smaller norm, then earlier episode.
inline const PhiFunction* lookup_phi(const PhiCatalogue& cat, double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("lookup_phi: p1 outside [0,1]");
  if (!(p2 >= 0.0 && p2 <= 1.0)) throw DomainError("lookup_phi: p2 outside [0,1]");
  const PhiFunction* best = nullptr;
  double best_res = 0.0;
  for (const auto& phi : cat.items) {
    const auto v = phi_eval(phi, p1, cat.pair_lookup_eps);
    if (!v) continue;
    const double res = std::abs(*v - p2);
    if (res > cat.pair_lookup_eps) continue;
    if (best == nullptr || res < best_res ||
        (res == best_res && (phi.norm < best->norm ||
                             (phi.norm == best->norm &&
                              phi.episode_id < best->episode_id)))) {
      best = &phi;
      best_res = res;
    }
  }
  return best;
}

inline std::string phi_to_csv(const PhiFunction& phi) {
  std::string out = "p,p_prime\n";
  for (const auto& pr : phi.pairs) {
    out += fmt17(pr.p);
    out += ',';
    out += fmt17(pr.p_prime);
    out += '\n';
  }
  return out;
}

inline PhiFunction phi_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "p,p_prime")
    throw IoError("phi_from_csv: missing 'p,p_prime' header");
  PhiFunction phi;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 2) throw IoError("phi_from_csv: expected 2 columns");
    phi.pairs.push_back({parse_double(cells[0]), parse_double(cells[1])});
  }
  if (!phi.pairs.empty()) phi.norm = phi_norm(phi);
  return phi;
}

inline nlohmann::json phi_sidecar_to_json(const PhiFunction& phi) {
  nlohmann::json j;
  j["episode_id"] = phi.episode_id;
  j["norm"] = phi.norm;
  if (phi.true_d) j["true_d"] = *phi.true_d;
  else j["true_d"] = nullptr;
  return j;
}

inline void phi_sidecar_from_json(const nlohmann::json& j, PhiFunction& phi) {
  try {
    phi.episode_id = j.at("episode_id").get<int>();
    phi.norm = j.at("norm").get<double>();
    if (j.contains("true_d") && !j.at("true_d").is_null())
      phi.true_d = j.at("true_d").get<double>();
    else
      phi.true_d = std::nullopt;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("phi sidecar: bad JSON: ") + e.what());
  }
}

}  // namespace sensemap
