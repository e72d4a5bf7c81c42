// Command-line driver for the sensorimotor rescaling experiment.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sensemap/runner.hpp"

namespace {

void print_report(const sensemap::IsometryReport& rep) {
  std::printf("pearson_r:            %.6f\n", rep.pearson_r);
  std::printf("rho_baseline_r:       %.6f\n", rep.rho_baseline_r);
  std::printf("max_affine_residual:  %.6f\n", rep.max_affine_residual);
  std::printf("episode_successes:    %lld\n",
              static_cast<long long>(rep.episode_success_count));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D sensorimotor agent: learn sensible rigid displacements, "
               "build the mu metric, recover physical space by 1D MDS"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::string> out_opt;
  int regenerate_every = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (defaults used if omitted)");
    sub->add_option("--seed", seed_opt, "Override the config seed");
    sub->add_option("--out", out_opt, "Override the output directory");
  };

  CLI::App* cmd_run = app.add_subcommand(
      "run", "Full pipeline: episodes, distance matrix, embedding, report");
  add_common(cmd_run);
  cmd_run->add_option("--regenerate-every", regenerate_every,
                      "Fresh environment every K episodes (0 = single environment)");

  CLI::App* cmd_phi = app.add_subcommand("phi", "Episode loop only: extract the phi catalogue");
  add_common(cmd_phi);
  cmd_phi->add_option("--regenerate-every", regenerate_every,
                      "Fresh environment every K episodes (0 = single environment)");

  CLI::App* cmd_metric =
      app.add_subcommand("metric", "Build the distance matrix from a persisted catalogue");
  add_common(cmd_metric);

  CLI::App* cmd_embed =
      app.add_subcommand("embed", "Embed a persisted distance matrix by 1D SMACOF");
  add_common(cmd_embed);

  CLI::App* cmd_report =
      app.add_subcommand("report", "Isometry report from a persisted embedding");
  add_common(cmd_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    sensemap::ExperimentConfig cfg;
    if (!config_path.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(sensemap::read_text_file(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw sensemap::IoError(std::string("config file: bad JSON: ") + e.what());
      }
      cfg = sensemap::config_from_json(j);
    }
    if (seed_opt) cfg.seed = *seed_opt;
    if (out_opt) cfg.output_dir = *out_opt;
    cfg.validate();

    if (app.got_subcommand(cmd_run)) {
      const auto res = sensemap::run_experiment(cfg, regenerate_every);
      std::printf("episodes:             %zu\n", res.episodes.size());
      std::printf("environment_retries:  %d\n", res.environment_retries);
      std::printf("stress_final:         %.3e\n", res.embedding.stress_trace.back());
      print_report(res.report);
    } else if (app.got_subcommand(cmd_phi)) {
      const auto res = sensemap::stage_phi(cfg, regenerate_every);
      std::printf("episodes:             %zu\n", res.episodes.size());
      std::printf("catalogue size:       %zu\n", res.catalogue.items.size());
    } else if (app.got_subcommand(cmd_metric)) {
      const auto m = sensemap::stage_metric(cfg);
      long long defined = 0, total = 0;
      for (int i = 0; i < m.size(); ++i)
        for (int j = i + 1; j < m.size(); ++j) {
          ++total;
          if (m.defined(i, j)) ++defined;
        }
      std::printf("sample points:        %d\n", m.size());
      std::printf("defined off-diagonal: %lld / %lld\n", defined, total);
    } else if (app.got_subcommand(cmd_embed)) {
      const auto e = sensemap::stage_embed(cfg);
      std::printf("iterations:           %d\n", e.iterations);
      std::printf("converged:            %s\n", e.converged ? "yes" : "no");
      std::printf("stress_final:         %.3e\n", e.stress_trace.back());
    } else if (app.got_subcommand(cmd_report)) {
      print_report(sensemap::stage_report(cfg));
    }
    return 0;
  } catch (const sensemap::ExperimentFailure& e) {
    std::fprintf(stderr, "experiment failure: %s\n", e.what());
    return 2;
  } catch (const sensemap::DegenerateInput& e) {
    std::fprintf(stderr, "experiment failure: %s\n", e.what());
    return 2;
  } catch (const sensemap::EmbedError& e) {
    std::fprintf(stderr, "experiment failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
