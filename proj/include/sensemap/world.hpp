#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensemap/common.hpp"
#include "sensemap/rng.hpp"

namespace sensemap {

struct LightSource {
  double position = 0.0;
};

// A rigid 1D world: fixed source layout plus a cumulative offset applied to
// every source at once.
struct Environment {
  std::vector<LightSource> sources;
  double offset = 0.0;
};

inline Environment generate_environment(std::uint64_t seed, int n_sources,
                                        double lo, double hi) {
  if (n_sources < 1) throw ConfigError("generate_environment: n_sources must be >= 1");
  if (!(lo < hi)) throw ConfigError("generate_environment: need lo < hi");
  Rng rng(seed);
  Environment env;
  env.sources.reserve(static_cast<std::size_t>(n_sources));
  for (int k = 0; k < n_sources; ++k) env.sources.push_back({rng.uniform(lo, hi)});
  return env;
}

// Summed Gaussian excitation with sigma^2 = 0.1, unnormalized so an isolated
// source peaks at exactly 1.
inline double luminance(const Environment& env, double x) {
  double sum = 0.0;
  for (const auto& s : env.sources) {
    const double dx = x - (s.position + env.offset);
    sum += std::exp(-dx * dx / 0.2);
  }
  return sum;
}

inline Environment shift_environment(Environment env, double d) {
  env.offset += d;
  return env;
}

inline nlohmann::json environment_to_json(const Environment& env) {
  nlohmann::json j;
  j["sources"] = nlohmann::json::array();
  for (const auto& s : env.sources) j["sources"].push_back(s.position);
  j["offset"] = env.offset;
  return j;
}

inline Environment environment_from_json(const nlohmann::json& j) {
  Environment env;
  try {
    for (const auto& v : j.at("sources")) {
      const double pos = v.get<double>();
      if (!std::isfinite(pos)) throw IoError("environment: non-finite source position");
      env.sources.push_back({pos});
    }
    env.offset = j.at("offset").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("environment: bad JSON: ") + e.what());
  }
  if (!std::isfinite(env.offset)) throw IoError("environment: non-finite offset");
  return env;
}

}  // namespace sensemap
