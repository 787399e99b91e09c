#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fblb/embed.hpp"
#include "fblb/optim.hpp"

namespace fblb {

inline constexpr int kCsvSchemaVersion = 1;

// One algorithm of the zoo by name plus hyperparameters.
struct AlgorithmSpec {
  std::string name = "projected_gd";  // projected_gd | regularized_gd | noisy_gd | heavy_ball | sgd | zero | reference
  StepSchedule eta{};
  bool eta_from_T = true;  // η = 1/√T unless "eta" is given
  Averaging averaging = Averaging::Uniform;
  double lambda = 0.0;
  RegularizedForm form = RegularizedForm::Proximal;
  double noise_std = 0.0;
  double momentum = 0.0;

  [[nodiscard]] bool per_sample() const { return name == "sgd"; }
  [[nodiscard]] StepSchedule schedule_for(std::size_t T) const;
};

// Builds the full-batch algorithm for a given oracle budget. Throws for "sgd".
AlgorithmFactory make_factory(const AlgorithmSpec& spec, Eigen::Index dim, std::size_t T,
                              const ConstructionParams& params);

struct GridSpec {
  std::vector<int> n{2};
  std::vector<int> T{4};
  std::vector<double> eps{0.25};
  std::optional<int> d;  // default: max{16, 4T} 2^n (2T in place of T for arbitration)
};

struct LeakageSpec {
  int d = 8;
  int k = 4;
  std::vector<int> d2{256, 1024, 4096};
  std::vector<double> c{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  int embeddings = 10;
};

struct ExperimentConfig {
  std::string experiment = "lemma_suite";  // separation | lemma_suite | concentration | leakage | arbitration
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::optional<ConstructionParams> instance;  // explicit parameters override the grid
  GridSpec grid;
  std::vector<AlgorithmSpec> algorithms;
  RiskMode risk_mode = RiskMode::exact();
  std::size_t fallback_mc_samples = 20000;
  LeakageSpec leakage;
  std::vector<int> d2;  // arbitration sweep
  SurrogateBudget surrogate;
  std::size_t max_d = std::size_t{1} << 22;

  void validate() const;
};

nlohmann::json to_json(const ConstructionParams& p);
ConstructionParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AlgorithmSpec& a);
AlgorithmSpec algorithm_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Hex FNV-1a of the canonical JSON echo.
std::string config_hash(const ExperimentConfig& c);

// d = max{16, 4T} 2^n.
long long concentration_dimension(int n, int T);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t column(const std::string& name) const;
};

std::string format_number(double x);

// Per-trial outcome of one algorithm on one sample.
struct TrialRecord {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::string algorithm;
  int T = 0;
  int n = 0;
  int d = 0;
  double eps = 0.0;
  std::size_t oracle_calls = 0;
  double excess_risk = 0.0;
  double std_error = 0.0;
  std::string risk_mode;
  std::size_t survivors = 0;
  bool conditioned = false;  // |I(S)| > T
};

struct SeparationSummary {
  std::string algorithm;
  int n = 0;
  int d = 0;
  int T = 0;
  double eps = 0.0;
  std::size_t oracle_calls = 0;
  std::size_t trials = 0;
  std::size_t conditioned_trials = 0;
  double mean_excess = 0.0;
  double std_error = 0.0;
  double cond_mean_excess = 0.0;
  double cond_std_error = 0.0;
  double lower_bound = 0.0;  // ε/8 + min{1 - 2ε²√T, 0}
  std::string status = "ok";
};

// Paired one-sided test of E[excess(full-batch) - excess(sgd)] > 0 over the
// trials of one grid point.
struct PairedComparison {
  std::string full_batch;
  int n = 0;
  int T = 0;
  double eps = 0.0;
  std::size_t trials = 0;
  double mean_diff = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

struct SeparationResult {
  std::vector<TrialRecord> trials;
  std::vector<SeparationSummary> summaries;
  std::vector<PairedComparison> comparisons;
};

// Sample mean and standard error of the mean.
std::pair<double, double> mean_and_std_error(const std::vector<double>& xs);

// One-sided p-value of a paired t-test for mean(diffs) > 0.
PairedComparison paired_one_sided(const std::vector<double>& diffs);

SeparationResult run_separation(const ExperimentConfig& config);
CsvTable separation_csv(const ExperimentConfig& config, const SeparationResult& r);
CsvTable trials_csv(const ExperimentConfig& config, const std::vector<TrialRecord>& trials);

// Every module property over config-driven trials; one entry per property
// with trials, violations and worst residual.
nlohmann::json run_lemma_suite(const ExperimentConfig& config);

CsvTable run_concentration(const ExperimentConfig& config);
CsvTable run_leakage(const ExperimentConfig& config);

struct ArbitrationTrial {
  int d2 = 0;
  std::size_t trial = 0;
  std::size_t divergences = 0;
  std::size_t first_split = 0;
  double max_leakage = 0.0;
};

struct ArbitrationSweep {
  std::vector<ArbitrationTrial> trials;
  CsvTable summary;
};

ArbitrationSweep run_arbitration(const ExperimentConfig& config);

// Runs the configured experiment and writes results.csv, report.json and
// config.echo.json under `out` (plus trials.csv where per-trial rows exist).
nlohmann::json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

// Worker count: FULLBATCH_LB_THREADS when set, else hardware concurrency.
unsigned pool_size();

// Calls fn(i) for i in [0, count) over the pool; fn must only write to
// per-index state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fblb
