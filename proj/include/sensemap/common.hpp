#pragma once

// Shared plumbing: error taxonomy, numeric formatting, hashing, small stats.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace sensemap {

// Invalid configuration values (bad ranges, non-positive tolerances).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Caller broke an API precondition (mismatched grids, empty inputs).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Input is valid in shape but degenerate in content (all-zero dissimilarities).
struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Embedding cannot be computed (disconnected dissimilarity graph).
struct EmbedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem or parse problems on external artifacts.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structurally valid run that produced no usable results.
struct ExperimentFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits round-trip an IEEE double exactly.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw ContractError("mean: empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ContractError("pearson: length mismatch");
  if (a.size() < 2) throw ContractError("pearson: need at least two samples");
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0)
    throw DegenerateInput("pearson: constant input has no correlation");
  return sab / std::sqrt(saa * sbb);
}

// Least-squares fit y ~ slope*x + intercept.
struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};

inline AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractError("fit_affine: length mismatch");
  if (x.size() < 2) throw ContractError("fit_affine: need at least two samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DegenerateInput("fit_affine: x is constant");
  AffineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::abs(y[i] - (fit.slope * x[i] + fit.intercept));
    if (r > fit.max_abs_residual) fit.max_abs_residual = r;
  }
  return fit;
}

}  // namespace sensemap
