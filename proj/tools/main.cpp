#include "tvbound/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

int report_issues(const std::string& path, const std::vector<tvbound::ConfigIssue>& issues) {
  for (const auto& issue : issues) std::cerr << path << ": " << issue.to_string() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound-constrained total-variation inversion"};
  app.require_subcommand(1);

  std::string output_dir;
  std::int64_t seed = -1;
  std::string variants;
  app.add_option("--output-dir", output_dir, "Directory for CSV and metrics files (overrides config)");
  app.add_option("--seed", seed, "Noise seed (overrides config)")->check(CLI::NonNegativeNumber);
  app.add_option("--variants", variants,
                 "Comma-separated subset of bound_constrained,unconstrained_tv,naive_projection,tikhonov");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->fallthrough();
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running it");
  validate_cmd->add_option("config", config_path, "Config file")->required();
  validate_cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    auto parsed = tvbound::load_experiment_config(config_path);
    auto& cfg = parsed.config;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!variants.empty()) {
      cfg.variants.clear();
      std::stringstream ss(variants);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (auto v = tvbound::parse_variant(name)) {
          cfg.variants.push_back(*v);
        } else {
          parsed.issues.push_back({0, "--variants", "unknown variant '" + name + "'"});
        }
      }
    }
    if (!parsed.ok()) return report_issues(config_path, parsed.issues);

    if (*validate_cmd) {
      std::cout << config_path << ": ok\n";
      return 0;
    }

    const auto outcome = tvbound::run_experiment(cfg);
    for (const auto& v : outcome.variants) {
      std::printf("%-18s iterations=%-5d rmse=%.6g objective=%.6g stationarity=%.3g\n",
                  std::string(tvbound::to_string(v.variant)).c_str(), v.result.iterations, v.metrics.rmse_vs_truth,
                  v.metrics.objective, v.metrics.stationarity_residual);
    }
    std::printf("wrote %s\n", cfg.output_dir.string().c_str());
    return 0;
  } catch (const tvbound::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
