#include <algorithm>
#include <climits>
#include <cmath>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "fblb/harness.hpp"

namespace fblb {

std::pair<double, double> mean_and_std_error(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

PairedComparison paired_one_sided(const std::vector<double>& diffs) {
  PairedComparison c;
  c.trials = diffs.size();
  std::tie(c.mean_diff, c.std_error) = mean_and_std_error(diffs);
  if (diffs.size() < 2) return c;
  if (c.std_error == 0.0) {
    c.t_stat = c.mean_diff > 0 ? INFINITY : (c.mean_diff < 0 ? -INFINITY : 0.0);
    c.p_value = c.mean_diff > 0 ? 0.0 : 1.0;
    return c;
  }
  c.t_stat = c.mean_diff / c.std_error;
  const boost::math::students_t dist(static_cast<double>(diffs.size() - 1));
  c.p_value = boost::math::cdf(boost::math::complement(dist, c.t_stat));
  return c;
}

namespace {

struct GridPoint {
  ConstructionParams params;
  std::string status = "ok";
};

std::vector<GridPoint> separation_points(const ExperimentConfig& config) {
  std::vector<GridPoint> out;
  if (config.instance) {
    out.push_back({*config.instance});
    return out;
  }
  for (int n : config.grid.n)
    for (int T : config.grid.T)
      for (double eps : config.grid.eps) {
        const long long d = config.grid.d ? *config.grid.d : concentration_dimension(n, T);
        GridPoint g;
        if (d > static_cast<long long>(config.max_d)) {
          g.params = canonical_params(eps, std::max(T, 1), 1, n);
          g.params.d = static_cast<int>(std::min<long long>(d, INT32_MAX));
          g.status = "skipped: requires d=" + std::to_string(d) + " > max_d=" + std::to_string(config.max_d);
        } else {
          g.params = canonical_params(eps, std::max(T, 1), static_cast<int>(d), n);
        }
        out.push_back(g);
      }
  return out;
}

std::string point_tag(std::size_t i) { return "/" + std::to_string(i); }

}  // namespace

SeparationResult run_separation(const ExperimentConfig& config) {
  config.validate();
  SeparationResult result;
  const auto points = separation_points(config);
  const std::size_t n_alg = config.algorithms.size();

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const auto& gp = points[pi];
    const auto& p = gp.params;
    const double lower = p.eps / 8.0 + std::min(1.0 - 2.0 * p.eps * p.eps * std::sqrt(double(p.T)), 0.0);
    if (gp.status != "ok") {
      for (const auto& a : config.algorithms) {
        SeparationSummary s;
        s.algorithm = a.name;
        s.n = p.n;
        s.d = p.d;
        s.T = p.T;
        s.eps = p.eps;
        s.lower_bound = lower;
        s.status = gp.status;
        result.summaries.push_back(s);
      }
      continue;
    }

    std::vector<TrialRecord> records(config.trials * n_alg);
    parallel_for(config.trials, [&](std::size_t trial) {
      Rng sample_rng = make_stream(config.seed, "separation.sample" + point_tag(pi), trial);
      const Sample s = draw_sample(p, sample_rng);
      const std::size_t survivors = survivor_set(s).size();
      for (std::size_t k = 0; k < n_alg; ++k) {
        const auto& spec = config.algorithms[k];
        const std::string tag = point_tag(pi) + "/" + std::to_string(k);
        Rng alg_rng = make_stream(config.seed, "separation.alg" + tag, trial);
        Trajectory tr;
        if (spec.per_sample()) {
          tr = sgd(spec.schedule_for(s.size()), s, alg_rng, spec.averaging);
        } else {
          auto alg = make_factory(spec, p.dim(), static_cast<std::size_t>(p.T), p)();
          tr = run_full_batch(*alg, [&](const Point& w) { return full_batch_oracle(w, s); },
                              static_cast<std::size_t>(p.T), alg_rng);
        }
        RiskMode mode = config.risk_mode;
        if (mode.kind == RiskMode::Kind::Exact && active_coordinates(tr.output, p) > kMaxExactActive)
          mode = RiskMode::monte_carlo(config.fallback_mc_samples);
        Rng risk_rng = make_stream(config.seed, "separation.risk" + tag, trial);
        const RiskEstimate risk = excess_risk(tr.output, p, mode, risk_rng);

        TrialRecord& r = records[trial * n_alg + k];
        r.experiment = "separation";
        r.seed = config.seed;
        r.trial = trial;
        r.algorithm = spec.name;
        r.T = p.T;
        r.n = p.n;
        r.d = p.d;
        r.eps = p.eps;
        r.oracle_calls = tr.oracle_calls;
        r.excess_risk = risk.mean;
        r.std_error = risk.std_error;
        r.risk_mode = mode.kind == RiskMode::Kind::Exact ? "exact" : "mc" + std::to_string(mode.samples);
        r.survivors = survivors;
        r.conditioned = survivors > static_cast<std::size_t>(p.T);
      }
    });

    std::vector<std::vector<double>> all(n_alg), cond(n_alg);
    for (const auto& r : records) {
      const std::size_t k = (&r - records.data()) % n_alg;
      all[k].push_back(r.excess_risk);
      if (r.conditioned) cond[k].push_back(r.excess_risk);
    }
    for (std::size_t k = 0; k < n_alg; ++k) {
      SeparationSummary s;
      s.algorithm = config.algorithms[k].name;
      s.n = p.n;
      s.d = p.d;
      s.T = p.T;
      s.eps = p.eps;
      s.oracle_calls = records[k].oracle_calls;
      s.trials = all[k].size();
      s.conditioned_trials = cond[k].size();
      std::tie(s.mean_excess, s.std_error) = mean_and_std_error(all[k]);
      std::tie(s.cond_mean_excess, s.cond_std_error) = mean_and_std_error(cond[k]);
      s.lower_bound = lower;
      result.summaries.push_back(s);
    }
    for (std::size_t sgd_k = 0; sgd_k < n_alg; ++sgd_k) {
      if (!config.algorithms[sgd_k].per_sample()) continue;
      for (std::size_t k = 0; k < n_alg; ++k) {
        if (config.algorithms[k].per_sample()) continue;
        std::vector<double> diffs;
        for (std::size_t t = 0; t < config.trials; ++t)
          diffs.push_back(records[t * n_alg + k].excess_risk - records[t * n_alg + sgd_k].excess_risk);
        PairedComparison c = paired_one_sided(diffs);
        c.full_batch = config.algorithms[k].name;
        c.n = p.n;
        c.T = p.T;
        c.eps = p.eps;
        result.comparisons.push_back(c);
      }
    }
    result.trials.insert(result.trials.end(), records.begin(), records.end());
  }
  return result;
}

CsvTable separation_csv(const ExperimentConfig& config, const SeparationResult& r) {
  CsvTable t;
  t.header = {"schema",       "experiment",     "seed",          "config_hash",        "algorithm",
              "n",            "d",              "T",             "eps",                "oracle_calls",
              "trials",       "conditioned_trials", "mean_excess", "std_error",        "cond_mean_excess",
              "cond_std_error", "lower_bound",  "status"};
  const std::string hash = config_hash(config);
  for (const auto& s : r.summaries)
    t.rows.push_back({std::to_string(kCsvSchemaVersion), "separation", std::to_string(config.seed), hash, s.algorithm,
                      std::to_string(s.n), std::to_string(s.d), std::to_string(s.T), format_number(s.eps),
                      std::to_string(s.oracle_calls), std::to_string(s.trials), std::to_string(s.conditioned_trials),
                      format_number(s.mean_excess), format_number(s.std_error), format_number(s.cond_mean_excess),
                      format_number(s.cond_std_error), format_number(s.lower_bound), s.status});
  return t;
}

CsvTable trials_csv(const ExperimentConfig& config, const std::vector<TrialRecord>& trials) {
  CsvTable t;
  t.header = {"schema", "experiment", "seed",      "config_hash", "trial",     "algorithm",  "n",
              "d",      "T",          "eps",       "oracle_calls", "excess_risk", "std_error", "risk_mode",
              "survivors", "conditioned"};
  const std::string hash = config_hash(config);
  for (const auto& r : trials)
    t.rows.push_back({std::to_string(kCsvSchemaVersion), r.experiment, std::to_string(r.seed), hash,
                      std::to_string(r.trial), r.algorithm, std::to_string(r.n), std::to_string(r.d),
                      std::to_string(r.T), format_number(r.eps), std::to_string(r.oracle_calls),
                      format_number(r.excess_risk), format_number(r.std_error), r.risk_mode,
                      std::to_string(r.survivors), r.conditioned ? "1" : "0"});
  return t;
}

}  // namespace fblb
