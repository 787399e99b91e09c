#include <fstream>

#include "fblb/harness.hpp"

namespace fblb {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

CsvTable arbitration_trials_csv(const ExperimentConfig& config, const std::vector<ArbitrationTrial>& trials) {
  CsvTable t;
  t.header = {"schema", "experiment", "seed", "config_hash", "d2", "trial", "divergences", "first_split", "max_leakage"};
  const std::string hash = config_hash(config);
  for (const auto& r : trials)
    t.rows.push_back({std::to_string(kCsvSchemaVersion), "arbitration", std::to_string(config.seed), hash,
                      std::to_string(r.d2), std::to_string(r.trial), std::to_string(r.divergences),
                      std::to_string(r.first_split), format_number(r.max_leakage)});
  return t;
}

CsvTable lemma_csv(const ExperimentConfig& config, const nlohmann::json& report) {
  CsvTable t;
  t.header = {"schema", "experiment", "seed", "config_hash", "property", "trials", "violations", "max_residual", "status"};
  for (const auto& p : report["properties"])
    t.rows.push_back({std::to_string(kCsvSchemaVersion), "lemma_suite", std::to_string(config.seed),
                      report["config_hash"].get<std::string>(), p["id"].get<std::string>(),
                      std::to_string(p["trials"].get<std::size_t>()), std::to_string(p["violations"].get<std::size_t>()),
                      format_number(p["max_residual"].get<double>()), p["status"].get<std::string>()});
  return t;
}

nlohmann::json table_json(const CsvTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json row;
    for (std::size_t i = 0; i < t.header.size(); ++i) row[t.header[i]] = r[i];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

nlohmann::json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out) {
  config.validate();
  std::filesystem::create_directories(out);
  const nlohmann::json echo = to_json(config);
  write_text(out / "config.echo.json", echo.dump(2) + "\n");

  nlohmann::json report{{"experiment", config.experiment},
                        {"seed", config.seed},
                        {"config_hash", config_hash(config)},
                        {"schema", kCsvSchemaVersion}};
  CsvTable results;
  if (config.experiment == "separation") {
    const SeparationResult r = run_separation(config);
    results = separation_csv(config, r);
    write_text(out / "trials.csv", trials_csv(config, r.trials).str());
    nlohmann::json cmp = nlohmann::json::array();
    for (const auto& c : r.comparisons)
      cmp.push_back({{"full_batch", c.full_batch},
                     {"n", c.n},
                     {"T", c.T},
                     {"eps", c.eps},
                     {"trials", c.trials},
                     {"mean_diff", c.mean_diff},
                     {"std_error", c.std_error},
                     {"t_stat", c.t_stat},
                     {"p_value", c.p_value}});
    report["summaries"] = table_json(results);
    report["comparisons"] = cmp;
  } else if (config.experiment == "lemma_suite") {
    nlohmann::json suite = run_lemma_suite(config);
    results = lemma_csv(config, suite);
    report.update(suite);
  } else if (config.experiment == "concentration") {
    results = run_concentration(config);
    report["rows"] = table_json(results);
  } else if (config.experiment == "leakage") {
    results = run_leakage(config);
    report["rows"] = table_json(results);
  } else if (config.experiment == "arbitration") {
    const ArbitrationSweep r = run_arbitration(config);
    results = r.summary;
    write_text(out / "trials.csv", arbitration_trials_csv(config, r.trials).str());
    report["rows"] = table_json(results);
  } else {
    throw InvalidArgument("unknown experiment " + config.experiment);
  }
  write_text(out / "results.csv", results.str());
  write_text(out / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace fblb
