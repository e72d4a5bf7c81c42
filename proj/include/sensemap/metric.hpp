#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensemap/common.hpp"
#include "sensemap/csv.hpp"
#include "sensemap/phi.hpp"

namespace sensemap {

// Symmetric matrix of mu distances over a regular proprioception sample.
// Missing entries are explicit: mask[i][j] = false means no catalogued phi
// links the pair.
struct DistanceMatrix {
  std::vector<double> sample;
  double step = 0.01;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<char>> mask;

  int size() const { return static_cast<int>(sample.size()); }
  bool defined(int i, int j) const { return mask[i][j] != 0; }
};

inline std::vector<double> sample_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("sample_grid: bad step");
  const double count = 1.0 / step;
  if (std::abs(count - std::llround(count)) > 1e-9)
    throw ConfigError("sample_grid: step must divide [0,1]");
  const int n = static_cast<int>(std::llround(count)) + 1;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i * step;
  return out;
}

inline DistanceMatrix build_distance_matrix(const PhiCatalogue& cat,
                                            double step = 0.01) {
  if (cat.items.empty()) throw ContractError("build_distance_matrix: empty catalogue");
  DistanceMatrix m;
  m.sample = sample_grid(step);
  m.step = step;
  const int n = m.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  m.mask.assign(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) m.mask[i][i] = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const PhiFunction* phi = lookup_phi(cat, m.sample[i], m.sample[j]);
      if (!phi) phi = lookup_phi(cat, m.sample[j], m.sample[i]);
      if (!phi) continue;
      m.values[i][j] = m.values[j][i] = phi->norm;
      m.mask[i][j] = m.mask[j][i] = 1;
    }
  }
  return m;
}

struct AxiomReport {
  long long identity_violations = 0;   // defined off-diagonal mu < 1e-9
  long long symmetry_violations = 0;
  long long negative_entries = 0;
  long long diagonal_errors = 0;       // nonzero or undefined diagonal
  long long triangle_violations = 0;
  long long defined_triples = 0;
  double worst_excess = 0.0;
};

inline AxiomReport check_metric_axioms(const DistanceMatrix& m,
                                       double tri_slack = 0.02) {
  AxiomReport rep;
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    if (m.values[i][i] != 0.0 || !m.defined(i, i)) ++rep.diagonal_errors;
    for (int j = i + 1; j < n; ++j) {
      if (m.defined(i, j) != m.defined(j, i) ||
          m.values[i][j] != m.values[j][i])
        ++rep.symmetry_violations;
      if (m.defined(i, j)) {
        if (m.values[i][j] < 1e-9) ++rep.identity_violations;
        if (m.values[i][j] < 0.0) ++rep.negative_entries;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!m.defined(i, j)) continue;
      for (int k = j + 1; k < n; ++k) {
        if (!m.defined(j, k) || !m.defined(i, k)) continue;
        ++rep.defined_triples;
        const double a = m.values[i][j];
        const double b = m.values[j][k];
        const double c = m.values[i][k];
        const double longest = std::max(a, std::max(b, c));
        const double excess = longest - (a + b + c - longest);
        if (excess > tri_slack) {
          ++rep.triangle_violations;
          if (excess > rep.worst_excess) rep.worst_excess = excess;
        }
      }
    }
  }
  return rep;
}

inline std::string matrix_values_to_csv(const DistanceMatrix& m) {
  std::string out;
  for (const auto& row : m.values) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += fmt17(row[j]);
    }
    out += '\n';
  }
  return out;
}

inline std::string matrix_mask_to_csv(const DistanceMatrix& m) {
  std::string out;
  for (const auto& row : m.mask) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += row[j] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json matrix_meta_to_json(const DistanceMatrix& m,
                                          std::uint64_t provenance_seed) {
  nlohmann::json j;
  j["sample"] = m.sample;
  j["step"] = m.step;
  j["seed"] = provenance_seed;
  return j;
}

inline DistanceMatrix matrix_from_csv(const std::string& values_csv,
                                      const std::string& mask_csv,
                                      const nlohmann::json& meta) {
  DistanceMatrix m;
  try {
    m.sample = meta.at("sample").get<std::vector<double>>();
    m.step = meta.at("step").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("matrix meta: bad JSON: ") + e.what());
  }
  const std::size_t n = m.sample.size();
  const auto vlines = split_lines(values_csv);
  const auto klines = split_lines(mask_csv);
  if (vlines.size() != n || klines.size() != n)
    throw IoError("matrix_from_csv: row count does not match sample");
  m.values.assign(n, std::vector<double>(n, 0.0));
  m.mask.assign(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto vcells = split_csv_line(vlines[i]);
    const auto kcells = split_csv_line(klines[i]);
    if (vcells.size() != n || kcells.size() != n)
      throw IoError("matrix_from_csv: column count does not match sample");
    for (std::size_t j = 0; j < n; ++j) {
      m.values[i][j] = parse_double(vcells[j]);
      if (kcells[j] == "1") m.mask[i][j] = 1;
      else if (kcells[j] == "0") m.mask[i][j] = 0;
      else throw IoError("matrix_from_csv: mask cells must be 0 or 1");
    }
  }
  return m;
}

}  // namespace sensemap
