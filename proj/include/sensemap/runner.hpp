#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sensemap/agent.hpp"
#include "sensemap/common.hpp"
#include "sensemap/csv.hpp"
#include "sensemap/embed.hpp"
#include "sensemap/metric.hpp"
#include "sensemap/phi.hpp"
#include "sensemap/rng.hpp"
#include "sensemap/world.hpp"

namespace sensemap {

namespace fs = std::filesystem;

struct ExperimentConfig {
  std::uint64_t seed = 7321;
  int n_sources = 5;
  double source_lo = -4.0;
  double source_hi = 5.0;
  int n_episodes = 191;
  double displacement_quantum = 0.01;
  double max_cumulative_offset = 0.95;
  double change_threshold = 0.05;
  double match_tol_rel = 0.002;
  double metric_step = 0.01;
  std::string output_dir = "out";

  void validate() const {
    if (n_sources < 1) throw ConfigError("config: n_sources must be >= 1");
    if (!(source_lo < source_hi)) throw ConfigError("config: source_range needs lo < hi");
    if (n_episodes < 0) throw ConfigError("config: n_episodes must be >= 0");
    if (!(displacement_quantum > 0.0))
      throw ConfigError("config: displacement_quantum must be > 0");
    if (!(max_cumulative_offset > 0.0 && max_cumulative_offset < 1.0))
      throw ConfigError("config: max_cumulative_offset must be in (0,1)");
    if (!(change_threshold > 0.0)) throw ConfigError("config: change_threshold must be > 0");
    if (!(match_tol_rel > 0.0)) throw ConfigError("config: match_tol_rel must be > 0");
    if (!(metric_step > 0.0 && metric_step <= 1.0))
      throw ConfigError("config: metric_step must be in (0,1]");
    if (static_cast<long long>(max_cumulative_offset / displacement_quantum + 1e-9) < 1)
      throw ConfigError("config: no nonzero displacement fits max_cumulative_offset");
    if (output_dir.empty()) throw ConfigError("config: output_dir must be non-empty");
  }
};

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["n_sources"] = cfg.n_sources;
  j["source_range"] = {cfg.source_lo, cfg.source_hi};
  j["n_episodes"] = cfg.n_episodes;
  j["displacement_quantum"] = cfg.displacement_quantum;
  j["max_cumulative_offset"] = cfg.max_cumulative_offset;
  j["change_threshold"] = cfg.change_threshold;
  j["match_tol_rel"] = cfg.match_tol_rel;
  j["metric_step"] = cfg.metric_step;
  j["output_dir"] = cfg.output_dir;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known = {
      "seed",          "n_sources",        "source_range",
      "n_episodes",    "displacement_quantum", "max_cumulative_offset",
      "change_threshold", "match_tol_rel", "metric_step",
      "output_dir"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("config: unknown key '" + item.key() + "'");
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_sources")) cfg.n_sources = j.at("n_sources").get<int>();
    if (j.contains("source_range")) {
      const auto r = j.at("source_range");
      if (!r.is_array() || r.size() != 2)
        throw ConfigError("config: source_range must be [lo, hi]");
      cfg.source_lo = r.at(0).get<double>();
      cfg.source_hi = r.at(1).get<double>();
    }
    if (j.contains("n_episodes")) cfg.n_episodes = j.at("n_episodes").get<int>();
    if (j.contains("displacement_quantum"))
      cfg.displacement_quantum = j.at("displacement_quantum").get<double>();
    if (j.contains("max_cumulative_offset"))
      cfg.max_cumulative_offset = j.at("max_cumulative_offset").get<double>();
    if (j.contains("change_threshold"))
      cfg.change_threshold = j.at("change_threshold").get<double>();
    if (j.contains("match_tol_rel"))
      cfg.match_tol_rel = j.at("match_tol_rel").get<double>();
    if (j.contains("metric_step")) cfg.metric_step = j.at("metric_step").get<double>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: bad JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

struct IsometryReport {
  double pearson_r = 0.0;
  double max_affine_residual = 0.0;
  double rho_baseline_r = 0.0;
  long long episode_success_count = 0;
};

inline nlohmann::json report_to_json(const IsometryReport& r) {
  nlohmann::json j;
  j["pearson_r"] = r.pearson_r;
  j["max_affine_residual"] = r.max_affine_residual;
  j["rho_baseline_r"] = r.rho_baseline_r;
  j["episode_success_count"] = r.episode_success_count;
  return j;
}

inline IsometryReport report_from_json(const nlohmann::json& j) {
  IsometryReport r;
  try {
    r.pearson_r = j.at("pearson_r").get<double>();
    r.max_affine_residual = j.at("max_affine_residual").get<double>();
    r.rho_baseline_r = j.at("rho_baseline_r").get<double>();
    r.episode_success_count = j.at("episode_success_count").get<long long>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("report: bad JSON: ") + e.what());
  }
  return r;
}

// Compares the recovered coordinates against the ground-truth positions
// x_i = pmap_inv(p_i), with raw p as the nonlinearity baseline.
inline IsometryReport evaluate_isometry(const Embedding& e, const BodyModel& body,
                                        const std::vector<double>& sample) {
  body.validate();
  if (e.normalized.size() != sample.size())
    throw ContractError("evaluate_isometry: embedding not normalized over this sample");
  std::vector<double> xs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) xs[i] = pmap_inv(sample[i]);
  IsometryReport rep;
  rep.pearson_r = pearson(e.normalized, xs);
  rep.max_affine_residual = fit_affine(xs, e.normalized).max_abs_residual;
  rep.rho_baseline_r = pearson(sample, xs);
  return rep;
}

// One displacement episode between consecutive scans. d = k*quantum with k
// uniform on nonzero integers, resampled so the cumulative offset respects
// max_cumulative_offset and every episode keeps scan overlap.
inline double draw_displacement(Rng& rng, double cumulative_offset,
                                const ExperimentConfig& cfg) {
  if (std::abs(cumulative_offset) > cfg.max_cumulative_offset + 1e-12)
    throw ContractError("draw_displacement: cumulative offset already out of range");
  const auto k_max = static_cast<std::int64_t>(
      cfg.max_cumulative_offset / cfg.displacement_quantum + 1e-9);
  if (k_max < 1)
    throw ConfigError("draw_displacement: no nonzero displacement fits the bound");
  for (;;) {
    const std::int64_t k = rng.uniform_int(-k_max, k_max);
    if (k == 0) continue;
    const double d = static_cast<double>(k) * cfg.displacement_quantum;
    if (std::abs(cumulative_offset + d) <= cfg.max_cumulative_offset + 1e-12) return d;
  }
}

struct EpisodeRecord {
  int episode = 0;
  double d = 0.0;
  double offset_after = 0.0;
  bool detected = false;
  bool extracted = false;
  int n_pairs = 0;
  double norm = 0.0;
};

inline std::string episodes_to_csv(const std::vector<EpisodeRecord>& eps) {
  std::string out = "episode,d,offset_after,detected,extracted,n_pairs,norm\n";
  for (const auto& r : eps) {
    out += std::to_string(r.episode);
    out += ',';
    out += fmt17(r.d);
    out += ',';
    out += fmt17(r.offset_after);
    out += ',';
    out += r.detected ? '1' : '0';
    out += ',';
    out += r.extracted ? '1' : '0';
    out += ',';
    out += std::to_string(r.n_pairs);
    out += ',';
    out += fmt17(r.norm);
    out += '\n';
  }
  return out;
}

struct EpisodeRunResult {
  Environment base_env;  // first accepted environment at offset 0
  int environment_retries = 0;
  PhiCatalogue catalogue;
  std::vector<EpisodeRecord> episodes;
};

// Generates environments until one passes the richness guard; the retry count
// feeds the run manifest so reruns are auditable.
inline std::pair<Environment, int> generate_rich_environment(
    std::uint64_t env_seed, const ExperimentConfig& cfg, const BodyModel& body,
    int max_attempts = 64) {
  for (int t = 0; t < max_attempts; ++t) {
    Environment env = generate_environment(retry_seed(env_seed, static_cast<std::uint64_t>(t)),
                                           cfg.n_sources, cfg.source_lo, cfg.source_hi);
    if (is_rich(scan(env, body), cfg.match_tol_rel)) return {env, t};
  }
  throw ExperimentFailure("generate_rich_environment: no rich environment after " +
                          std::to_string(max_attempts) + " attempts");
}

// The full acquisition loop: scan, displace, detect, extract, catalogue.
// regenerate_every > 0 swaps in a fresh environment every that many episodes
// (multi-environment invariance study); 0 keeps one environment throughout.
inline EpisodeRunResult run_episodes(const ExperimentConfig& cfg,
                                     int regenerate_every = 0) {
  cfg.validate();
  if (regenerate_every < 0) throw ConfigError("run_episodes: regenerate_every must be >= 0");
  const BodyModel body;
  Rng disp_rng(derive_seed(cfg.seed, kDisplacementStream));

  EpisodeRunResult out;
  out.catalogue.match_tol_rel = cfg.match_tol_rel;
  int env_index = 0;
  auto [env, retries] = generate_rich_environment(cfg.seed, cfg, body);
  out.base_env = env;
  out.environment_retries = retries;
  Scan old_scan = scan(env, body);

  for (int e = 0; e < cfg.n_episodes; ++e) {
    if (regenerate_every > 0 && e > 0 && e % regenerate_every == 0) {
      ++env_index;
      auto [next_env, next_retries] = generate_rich_environment(
          cfg.seed ^ (kEnvStride * static_cast<std::uint64_t>(env_index)), cfg, body);
      env = next_env;
      out.environment_retries += next_retries;
      old_scan = scan(env, body);
    }
    const double d = draw_displacement(disp_rng, env.offset, cfg);
    env = shift_environment(env, d);
    const Scan new_scan = scan(env, body);

    EpisodeRecord rec;
    rec.episode = e;
    rec.d = d;
    rec.offset_after = env.offset;
    rec.detected = detect_change(old_scan, new_scan, cfg.change_threshold);
    if (rec.detected) {
      auto phi = match_coincidences(old_scan, new_scan, e, cfg.match_tol_rel);
      if (phi) {
        phi->true_d = d;
        rec.extracted = true;
        rec.n_pairs = static_cast<int>(phi->pairs.size());
        rec.norm = phi->norm;
        out.catalogue.items.push_back(std::move(*phi));
      }
    }
    out.episodes.push_back(rec);
    old_scan = new_scan;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence. All artifacts live flat in the output directory; phi functions
// get a subdirectory with their own manifest.

namespace paths {
inline constexpr const char* kEnvironment = "environment.json";
inline constexpr const char* kEpisodes = "episodes.csv";
inline constexpr const char* kCatalogueDir = "catalogue";
inline constexpr const char* kCatalogueManifest = "catalogue/manifest.json";
inline constexpr const char* kMatrixValues = "matrix_values.csv";
inline constexpr const char* kMatrixMask = "matrix_mask.csv";
inline constexpr const char* kMatrixMeta = "matrix_meta.json";
inline constexpr const char* kEmbeddingCsv = "embedding.csv";
inline constexpr const char* kEmbeddingMeta = "embedding.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kFig3a = "fig3a_phis.csv";
inline constexpr const char* kFig3b = "fig3b_metric.csv";
inline constexpr const char* kFig3c = "fig3c_rescaled.csv";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace paths

inline std::string phi_file_stem(int episode_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "phi_%03d", episode_id);
  return buf;
}

inline void ensure_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
}

inline void persist_catalogue(const PhiCatalogue& cat, const fs::path& out_dir) {
  ensure_output_dir(out_dir / paths::kCatalogueDir);
  nlohmann::json manifest;
  manifest["match_tol_rel"] = cat.match_tol_rel;
  manifest["pair_lookup_eps"] = cat.pair_lookup_eps;
  manifest["episode_success_count"] = cat.items.size();
  manifest["items"] = nlohmann::json::array();
  for (const auto& phi : cat.items) {
    const std::string stem = phi_file_stem(phi.episode_id);
    write_text_file(out_dir / paths::kCatalogueDir / (stem + ".csv"), phi_to_csv(phi));
    write_text_file(out_dir / paths::kCatalogueDir / (stem + ".json"),
                    phi_sidecar_to_json(phi).dump(2) + "\n");
    nlohmann::json item;
    item["episode_id"] = phi.episode_id;
    item["csv"] = stem + ".csv";
    item["sidecar"] = stem + ".json";
    manifest["items"].push_back(item);
  }
  write_text_file(out_dir / paths::kCatalogueManifest, manifest.dump(2) + "\n");
}

inline PhiCatalogue load_catalogue(const fs::path& out_dir) {
  const fs::path mpath = out_dir / paths::kCatalogueManifest;
  if (!fs::exists(mpath))
    throw IoError("no catalogue at " + mpath.string() + " (run the phi stage first)");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(mpath));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("catalogue manifest: bad JSON: ") + e.what());
  }
  PhiCatalogue cat;
  try {
    cat.match_tol_rel = manifest.at("match_tol_rel").get<double>();
    cat.pair_lookup_eps = manifest.at("pair_lookup_eps").get<double>();
    for (const auto& item : manifest.at("items")) {
      PhiFunction phi = phi_from_csv(read_text_file(
          out_dir / paths::kCatalogueDir / item.at("csv").get<std::string>()));
      const auto sidecar = nlohmann::json::parse(read_text_file(
          out_dir / paths::kCatalogueDir / item.at("sidecar").get<std::string>()));
      phi_sidecar_from_json(sidecar, phi);
      cat.items.push_back(std::move(phi));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("catalogue manifest: bad JSON: ") + e.what());
  }
  return cat;
}

inline void persist_matrix(const DistanceMatrix& m, std::uint64_t provenance_seed,
                           const fs::path& out_dir) {
  write_text_file(out_dir / paths::kMatrixValues, matrix_values_to_csv(m));
  write_text_file(out_dir / paths::kMatrixMask, matrix_mask_to_csv(m));
  write_text_file(out_dir / paths::kMatrixMeta,
                  matrix_meta_to_json(m, provenance_seed).dump(2) + "\n");
}

inline DistanceMatrix load_matrix(const fs::path& out_dir) {
  const fs::path meta_path = out_dir / paths::kMatrixMeta;
  if (!fs::exists(meta_path))
    throw IoError("no distance matrix at " + meta_path.string() +
                  " (run the metric stage first)");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text_file(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("matrix meta: bad JSON: ") + e.what());
  }
  return matrix_from_csv(read_text_file(out_dir / paths::kMatrixValues),
                         read_text_file(out_dir / paths::kMatrixMask), meta);
}

inline void persist_embedding(const Embedding& e, const std::vector<double>& sample,
                              const fs::path& out_dir) {
  write_text_file(out_dir / paths::kEmbeddingCsv, embedding_to_csv(e, sample));
  write_text_file(out_dir / paths::kEmbeddingMeta,
                  embedding_meta_to_json(e).dump(2) + "\n");
}

inline Embedding load_embedding(const fs::path& out_dir, std::vector<double>& sample) {
  const fs::path csv_path = out_dir / paths::kEmbeddingCsv;
  if (!fs::exists(csv_path))
    throw IoError("no embedding at " + csv_path.string() + " (run the embed stage first)");
  Embedding e;
  embedding_from_csv(read_text_file(csv_path), sample, e);
  try {
    const auto meta = nlohmann::json::parse(read_text_file(out_dir / paths::kEmbeddingMeta));
    e.stress_trace = {meta.at("stress_final").get<double>()};
    e.iterations = meta.at("iterations").get<int>();
    e.converged = meta.at("converged").get<bool>();
  } catch (const nlohmann::json::exception& err) {
    throw IoError(std::string("embedding meta: bad JSON: ") + err.what());
  }
  return e;
}

inline void emit_fig3a(const PhiCatalogue& cat, const fs::path& out_dir) {
  std::string out = "episode_id,p,p_prime\n";
  for (const auto& phi : cat.items) {
    for (const auto& pr : phi.pairs) {
      out += std::to_string(phi.episode_id);
      out += ',';
      out += fmt17(pr.p);
      out += ',';
      out += fmt17(pr.p_prime);
      out += '\n';
    }
  }
  write_text_file(out_dir / paths::kFig3a, out);
}

inline void emit_fig3b(const DistanceMatrix& m, const fs::path& out_dir) {
  std::string out = "p_i,p_j,mu,defined\n";
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out += fmt17(m.sample[i]);
      out += ',';
      out += fmt17(m.sample[j]);
      out += ',';
      out += fmt17(m.values[i][j]);
      out += ',';
      out += m.defined(i, j) ? '1' : '0';
      out += '\n';
    }
  }
  write_text_file(out_dir / paths::kFig3b, out);
}

inline void emit_fig3c(const Embedding& e, const std::vector<double>& sample,
                       const fs::path& out_dir) {
  if (e.normalized.size() != sample.size())
    throw ContractError("emit_fig3c: embedding not normalized over this sample");
  std::string out = "p,P,x\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out += fmt17(sample[i]);
    out += ',';
    out += fmt17(e.normalized[i]);
    out += ',';
    out += fmt17(pmap_inv(sample[i]));
    out += '\n';
  }
  write_text_file(out_dir / paths::kFig3c, out);
}

inline void emit_plot_data(const PhiCatalogue& cat, const DistanceMatrix& m,
                           const Embedding& e, const fs::path& out_dir) {
  emit_fig3a(cat, out_dir);
  emit_fig3b(m, out_dir);
  emit_fig3c(e, m.sample, out_dir);
}

// Rewrites manifest.json with the config echo and a checksum of every known
// artifact currently on disk. The environment retry count is carried forward
// from the previous manifest when this stage did not regenerate environments.
inline void update_manifest(const ExperimentConfig& cfg, const fs::path& out_dir,
                            std::optional<int> environment_retries = std::nullopt) {
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  if (!environment_retries) {
    const fs::path prev = out_dir / paths::kManifest;
    if (fs::exists(prev)) {
      try {
        const auto old = nlohmann::json::parse(read_text_file(prev));
        if (old.contains("environment_retries") && old["environment_retries"].is_number())
          environment_retries = old["environment_retries"].get<int>();
      } catch (const nlohmann::json::exception&) {
        // stale manifest; rewrite without the retry count
      }
    }
  }
  if (environment_retries) j["environment_retries"] = *environment_retries;
  else j["environment_retries"] = nullptr;

  std::vector<std::string> names = {
      paths::kEnvironment, paths::kEpisodes,    paths::kCatalogueManifest,
      paths::kMatrixValues, paths::kMatrixMask, paths::kMatrixMeta,
      paths::kEmbeddingCsv, paths::kEmbeddingMeta, paths::kReport,
      paths::kFig3a,        paths::kFig3b,      paths::kFig3c};
  if (fs::exists(out_dir / paths::kCatalogueDir)) {
    std::vector<std::string> phis;
    for (const auto& entry : fs::directory_iterator(out_dir / paths::kCatalogueDir)) {
      const std::string fname = entry.path().filename().string();
      if (fname != "manifest.json")
        phis.push_back(std::string(paths::kCatalogueDir) + "/" + fname);
    }
    std::sort(phis.begin(), phis.end());
    names.insert(names.end(), phis.begin(), phis.end());
  }
  j["artifacts"] = nlohmann::json::object();
  for (const auto& name : names) {
    const fs::path p = out_dir / name;
    if (!fs::exists(p)) continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_text_file(p))));
    j["artifacts"][name] = buf;
  }
  write_text_file(out_dir / paths::kManifest, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Pipeline stages. Each persists what it computes and refreshes the manifest,
// so later stages can resume from disk.

inline EpisodeRunResult stage_phi(const ExperimentConfig& cfg, int regenerate_every = 0) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  ensure_output_dir(out_dir);
  EpisodeRunResult res = run_episodes(cfg, regenerate_every);
  write_text_file(out_dir / paths::kEnvironment,
                  environment_to_json(res.base_env).dump(2) + "\n");
  write_text_file(out_dir / paths::kEpisodes, episodes_to_csv(res.episodes));
  persist_catalogue(res.catalogue, out_dir);
  emit_fig3a(res.catalogue, out_dir);
  update_manifest(cfg, out_dir, res.environment_retries);
  if (res.catalogue.items.empty())
    throw ExperimentFailure("run produced an empty catalogue: no episode yielded a phi");
  return res;
}

inline DistanceMatrix stage_metric(const ExperimentConfig& cfg,
                                   const PhiCatalogue* cat = nullptr) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  PhiCatalogue loaded;
  if (!cat) {
    loaded = load_catalogue(out_dir);
    cat = &loaded;
  }
  if (cat->items.empty())
    throw ExperimentFailure("catalogue is empty: cannot build a distance matrix");
  DistanceMatrix m = build_distance_matrix(*cat, cfg.metric_step);
  persist_matrix(m, cfg.seed, out_dir);
  emit_fig3b(m, out_dir);
  update_manifest(cfg, out_dir);
  return m;
}

inline Embedding stage_embed(const ExperimentConfig& cfg,
                             const DistanceMatrix* m = nullptr) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  DistanceMatrix loaded;
  if (!m) {
    loaded = load_matrix(out_dir);
    m = &loaded;
  }
  Embedding e = smacof_1d(*m, classical_mds_init(*m));
  e = normalize_embedding(std::move(e), m->sample);
  persist_embedding(e, m->sample, out_dir);
  update_manifest(cfg, out_dir);
  return e;
}

inline IsometryReport stage_report(const ExperimentConfig& cfg,
                                   const Embedding* e = nullptr,
                                   const std::vector<double>* sample = nullptr,
                                   const PhiCatalogue* cat = nullptr) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  Embedding loaded_e;
  std::vector<double> loaded_sample;
  if (!e || !sample) {
    loaded_e = load_embedding(out_dir, loaded_sample);
    e = &loaded_e;
    sample = &loaded_sample;
  }
  long long successes = 0;
  if (cat) {
    successes = static_cast<long long>(cat->items.size());
  } else {
    const fs::path mpath = out_dir / paths::kCatalogueManifest;
    if (!fs::exists(mpath))
      throw IoError("no catalogue at " + mpath.string() + " (run the phi stage first)");
    try {
      const auto manifest = nlohmann::json::parse(read_text_file(mpath));
      successes = manifest.at("episode_success_count").get<long long>();
    } catch (const nlohmann::json::exception& err) {
      throw IoError(std::string("catalogue manifest: bad JSON: ") + err.what());
    }
  }
  const BodyModel body;
  IsometryReport rep = evaluate_isometry(*e, body, *sample);
  rep.episode_success_count = successes;
  write_text_file(out_dir / paths::kReport, report_to_json(rep).dump(2) + "\n");
  emit_fig3c(*e, *sample, out_dir);
  update_manifest(cfg, out_dir);
  return rep;
}

struct RunResult {
  PhiCatalogue catalogue;
  DistanceMatrix matrix;
  Embedding embedding;
  IsometryReport report;
  std::vector<EpisodeRecord> episodes;
  Environment base_env;
  int environment_retries = 0;
};

inline RunResult run_experiment(const ExperimentConfig& cfg, int regenerate_every = 0) {
  RunResult out;
  EpisodeRunResult ep = stage_phi(cfg, regenerate_every);
  out.catalogue = std::move(ep.catalogue);
  out.episodes = std::move(ep.episodes);
  out.base_env = std::move(ep.base_env);
  out.environment_retries = ep.environment_retries;
  out.matrix = stage_metric(cfg, &out.catalogue);
  out.embedding = stage_embed(cfg, &out.matrix);
  out.report = stage_report(cfg, &out.embedding, &out.matrix.sample, &out.catalogue);
  return out;
}

}  // namespace sensemap
