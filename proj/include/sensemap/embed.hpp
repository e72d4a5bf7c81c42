#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sensemap/common.hpp"
#include "sensemap/csv.hpp"
#include "sensemap/metric.hpp"

namespace sensemap {

struct Embedding {
  std::vector<double> coords;
  std::vector<double> stress_trace;  // STRESS1 before and after each iteration
  std::vector<double> normalized;
  int iterations = 0;
  bool converged = false;
};

// Kruskal's STRESS-1 over the defined entries only; the denominator uses the
// dissimilarities (conventions differ, so stated here).
inline double stress1(const DistanceMatrix& m, const std::vector<double>& coords) {
  const int n = m.size();
  if (static_cast<int>(coords.size()) != n)
    throw ContractError("stress1: coords length does not match sample");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!m.defined(i, j)) continue;
      const double mu = m.values[i][j];
      const double dij = std::abs(coords[i] - coords[j]);
      num += (mu - dij) * (mu - dij);
      den += mu * mu;
    }
  }
  if (den == 0.0)
    throw DegenerateInput("stress1: all defined dissimilarities are zero");
  return std::sqrt(num / den);
}

namespace detail {

inline bool weight_graph_connected(const DistanceMatrix& m) {
  const int n = m.size();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int i = queue.back();
    queue.pop_back();
    for (int j = 0; j < n; ++j) {
      if (j == i || seen[j] || !m.defined(i, j)) continue;
      seen[j] = 1;
      queue.push_back(j);
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace detail

// Classical MDS on the mask-completed matrix (missing entries filled with the
// baseline |p_i - p_j|). Deterministic, so the whole pipeline stays seeded.
inline std::vector<double> classical_mds_init(const DistanceMatrix& m) {
  const int n = m.size();
  if (n < 2) throw ContractError("classical_mds_init: need at least two points");
  Eigen::MatrixXd d2(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = m.defined(i, j) ? m.values[i][j]
                                       : std::abs(m.sample[i] - m.sample[j]);
      d2(i, j) = d * d;
    }
  }
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd b = -0.5 * centering * d2 * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  const double lambda = es.eigenvalues()(n - 1);
  std::vector<double> coords(static_cast<std::size_t>(n), 0.0);
  if (lambda <= 0.0) {
    // Degenerate Gram matrix; fall back to the sample itself.
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = m.sample[i];
    return coords;
  }
  const double scale = std::sqrt(lambda);
  for (int i = 0; i < n; ++i)
    coords[static_cast<std::size_t>(i)] = es.eigenvectors()(i, n - 1) * scale;
  return coords;
}

// SMACOF majorization in one dimension with weights 1 on defined entries and
// 0 elsewhere. The Guttman transform uses the Moore-Penrose inverse of
// V = diag(W1) - W, computed as (V + J)^-1 - J with J = 11^T/n.
inline Embedding smacof_1d(const DistanceMatrix& m, const std::vector<double>& init,
                           int max_iter = 1000, double tol = 1e-9) {
  const int n = m.size();
  if (static_cast<int>(init.size()) != n)
    throw ContractError("smacof_1d: init length does not match sample");
  long long defined_offdiag = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m.defined(i, j)) ++defined_offdiag;
  if (defined_offdiag == 0)
    throw ContractError("smacof_1d: no defined off-diagonal entries");
  if (!detail::weight_graph_connected(m))
    throw EmbedError("smacof_1d: dissimilarity graph is disconnected");
  if (max_iter < 0) throw ConfigError("smacof_1d: max_iter must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("smacof_1d: tol must be > 0");

  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || !m.defined(i, j)) continue;
      v(i, j) = -1.0;
      v(i, i) += 1.0;
    }
  }
  const Eigen::MatrixXd ones_n = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd v_pinv = (v + ones_n).inverse() - ones_n;

  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = init[static_cast<std::size_t>(i)];
  std::vector<double> coords(init);

  Embedding e;
  e.stress_trace.push_back(stress1(m, coords));
  for (int k = 1; k <= max_iter; ++k) {
    Eigen::MatrixXd bz = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!m.defined(i, j)) continue;
        const double dij = std::abs(c(i) - c(j));
        const double bij = dij > 0.0 ? -m.values[i][j] / dij : 0.0;
        bz(i, j) = bij;
        bz(j, i) = bij;
        bz(i, i) -= bij;
        bz(j, j) -= bij;
      }
    }
    c = v_pinv * (bz * c);
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = c(i);
    const double prev = e.stress_trace.back();
    const double s = stress1(m, coords);
    e.stress_trace.push_back(s);
    e.iterations = k;
    if (prev - s < tol) {
      e.converged = true;
      break;
    }
  }
  e.coords = coords;
  return e;
}

// Gauge fixing: reflect if anti-correlated with the reference grid, then map
// affinely onto [0,1].
inline Embedding normalize_embedding(Embedding e, const std::vector<double>& reference_p) {
  if (e.coords.size() != reference_p.size())
    throw ContractError("normalize_embedding: reference length mismatch");
  const auto [mn_it, mx_it] = std::minmax_element(e.coords.begin(), e.coords.end());
  if (*mn_it == *mx_it)
    throw DegenerateInput("normalize_embedding: constant coordinates");
  if (pearson(e.coords, reference_p) < 0.0)
    for (double& ci : e.coords) ci = -ci;
  const auto [mn2_it, mx2_it] = std::minmax_element(e.coords.begin(), e.coords.end());
  const double lo = *mn2_it, span = *mx2_it - *mn2_it;
  e.normalized.resize(e.coords.size());
  for (std::size_t i = 0; i < e.coords.size(); ++i)
    e.normalized[i] = (e.coords[i] - lo) / span;
  return e;
}

inline std::string embedding_to_csv(const Embedding& e, const std::vector<double>& sample) {
  if (e.normalized.size() != sample.size())
    throw ContractError("embedding_to_csv: embedding not normalized over this sample");
  std::string out = "p,P_normalized\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out += fmt17(sample[i]);
    out += ',';
    out += fmt17(e.normalized[i]);
    out += '\n';
  }
  return out;
}

inline nlohmann::json embedding_meta_to_json(const Embedding& e) {
  nlohmann::json j;
  j["stress_final"] = e.stress_trace.empty() ? 0.0 : e.stress_trace.back();
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  return j;
}

// Rebuilds the normalized coordinates (and sample) persisted by
// embedding_to_csv; the stress trace is not round-tripped.
inline void embedding_from_csv(const std::string& text, std::vector<double>& sample,
                               Embedding& e) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "p,P_normalized")
    throw IoError("embedding_from_csv: missing 'p,P_normalized' header");
  sample.clear();
  e.normalized.clear();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 2) throw IoError("embedding_from_csv: expected 2 columns");
    sample.push_back(parse_double(cells[0]));
    e.normalized.push_back(parse_double(cells[1]));
  }
}

}  // namespace sensemap
