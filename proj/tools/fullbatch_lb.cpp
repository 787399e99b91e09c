#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fblb/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hard-instance lab for full-batch stochastic convex optimization"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();

  std::uint64_t suite_seed = 0;
  std::size_t suite_trials = 50;
  auto* suite = app.add_subcommand("suite", "Run the lemma property suite on the default instance");
  suite->add_option("--seed", suite_seed, "Seed")->required();
  suite->add_option("--trials", suite_trials, "Trials per property");

  double eps = 0.25;
  int T = 4, d = 64, n = 2;
  auto* params = app.add_subcommand("params", "Print the canonical parameter schedule");
  params->add_option("--eps", eps)->required();
  params->add_option("--T", T)->required();
  params->add_option("--d", d)->required();
  params->add_option("--n", n)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::ifstream f(config_path);
      const auto config = fblb::config_from_json(nlohmann::json::parse(f));
      const auto report = fblb::run_experiment(config, out_dir);
      std::cout << "wrote " << out_dir << " (config " << report["config_hash"].get<std::string>() << ")\n";
      return 0;
    }
    if (*suite) {
      fblb::ExperimentConfig config;
      config.experiment = "lemma_suite";
      config.seed = suite_seed;
      config.trials = suite_trials;
      const auto report = fblb::run_lemma_suite(config);
      std::cout << report.dump(2) << "\n";
      return report["failed"].get<std::size_t>() == 0 ? 0 : 1;
    }
    if (*params) {
      const auto p = fblb::canonical_params(eps, T, d, n);
      p.validate();
      std::cout << fblb::to_json(p).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
