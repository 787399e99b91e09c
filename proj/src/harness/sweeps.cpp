#include <algorithm>
#include <cmath>

#include "fblb/harness.hpp"

namespace fblb {

CsvTable run_concentration(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    int n, T;
    long long d;
  };
  std::vector<Cell> cells;
  for (int n : config.grid.n)
    for (int T : config.grid.T)
      cells.push_back({n, T, config.grid.d ? *config.grid.d : concentration_dimension(n, T)});

  std::vector<std::vector<std::string>> rows(cells.size());
  const std::string hash = config_hash(config);
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto& c = cells[i];
    const double exact = c.d > static_cast<long long>(config.max_d)
                             ? NAN
                             : binomial_upper_tail(static_cast<int>(c.d), std::ldexp(1.0, -c.n), 2 * c.T);
    std::vector<std::string> row{std::to_string(kCsvSchemaVersion), "concentration", std::to_string(config.seed), hash,
                                 std::to_string(c.n), std::to_string(c.T), std::to_string(c.d),
                                 std::to_string(config.trials)};
    if (c.d > static_cast<long long>(config.max_d)) {
      row.insert(row.end(), {"nan", "nan", "nan", "0.75",
                             "skipped: requires d=" + std::to_string(c.d) + " > max_d=" + std::to_string(config.max_d)});
    } else {
      Rng rng = make_stream(config.seed, "concentration", i);
      const ProbeResult r = concentration_probe(c.n, static_cast<int>(c.d), c.T, config.trials, rng);
      row.insert(row.end(), {format_number(r.probability), format_number(r.std_error), format_number(exact), "0.75",
                             "ok"});
    }
    rows[i] = std::move(row);
  });
  CsvTable t;
  t.header = {"schema", "experiment",     "seed",      "config_hash", "n",           "T",     "d",
              "trials", "empirical_prob", "std_error", "exact_prob",  "claim_bound", "status"};
  t.rows = std::move(rows);
  return t;
}

CsvTable run_leakage(const ExperimentConfig& config) {
  config.validate();
  const auto& L = config.leakage;
  const Eigen::Index dim = L.d + 2;
  if (L.k < 0 || L.k > dim) throw InvalidArgument("leakage k must lie in [0, d+2]");

  Rng sub_rng = make_stream(config.seed, "leakage.subspace");
  std::vector<Point> gens;
  for (int j = 0; j < L.k; ++j) {
    Point g(dim);
    for (Eigen::Index i = 0; i < dim; ++i) g(i) = sub_rng.normal();
    gens.push_back(g);
  }
  const SpanBasis basis = SpanBasis::from_generators(gens, dim);

  CsvTable t;
  t.header = {"schema",         "experiment", "seed",          "config_hash",    "d",         "k",
              "d2",             "c",          "empirical_prob", "bound_rhs",     "bound_derived", "trials",
              "within_stated",  "within_derived", "status"};
  const std::string hash = config_hash(config);
  const std::size_t embeddings = static_cast<std::size_t>(std::max(1, L.embeddings));
  const std::size_t per = (config.trials + embeddings - 1) / embeddings;

  for (std::size_t di = 0; di < L.d2.size(); ++di) {
    const int d2 = L.d2[di];
    if (d2 < dim) {
      for (double c : L.c)
        t.rows.push_back({std::to_string(kCsvSchemaVersion), "leakage", std::to_string(config.seed), hash,
                          std::to_string(L.d), std::to_string(L.k), std::to_string(d2), format_number(c), "nan",
                          "nan", "nan", "0", "", "", "skipped: d2 below d+2"});
      continue;
    }
    std::vector<std::vector<double>> samples(embeddings);
    parallel_for(embeddings, [&](std::size_t e) {
      Rng rng = make_stream(config.seed, "leakage/" + std::to_string(d2), e);
      const OrthoEmbedding emb = sample_orthogonal(dim, d2, rng);
      const std::size_t begin = e * per;
      const std::size_t end = std::min(config.trials, begin + per);
      for (std::size_t j = begin; j < end; ++j) {
        Point w(d2);
        for (Eigen::Index i = 0; i < d2; ++i) w(i) = rng.normal();
        w.normalize();
        samples[e].push_back(leakage(w, emb, basis));
      }
    });
    std::vector<double> all;
    for (auto& s : samples) all.insert(all.end(), s.begin(), s.end());
    for (double c : L.c) {
      const auto above = std::count_if(all.begin(), all.end(), [c](double x) { return x > c; });
      const double emp = static_cast<double>(above) / static_cast<double>(all.size());
      const double stated = leakage_bound_stated(dim, basis.rank(), d2, c);
      const double derived = leakage_bound_derived(dim, basis.rank(), d2, c);
      t.rows.push_back({std::to_string(kCsvSchemaVersion), "leakage", std::to_string(config.seed), hash,
                        std::to_string(L.d), std::to_string(L.k), std::to_string(d2), format_number(c),
                        format_number(emp), format_number(stated), format_number(derived), std::to_string(all.size()),
                        emp <= stated ? "1" : "0", emp <= derived ? "1" : "0", "ok"});
    }
  }
  return t;
}

namespace {

ConstructionParams arbitration_params(const ExperimentConfig& config) {
  if (config.instance) return *config.instance;
  const int n = config.grid.n.front();
  const int T = std::max(1, config.grid.T.front());
  const long long d = config.grid.d ? *config.grid.d : concentration_dimension(n, 2 * T);
  return canonical_params(config.grid.eps.front(), T, static_cast<int>(d), n);
}

double median(std::vector<double> xs) {
  if (xs.empty()) return NAN;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

}  // namespace

ArbitrationSweep run_arbitration(const ExperimentConfig& config) {
  config.validate();
  const ConstructionParams p = arbitration_params(config);
  const auto T = static_cast<std::size_t>(p.T);
  AlgorithmSpec spec;
  if (!config.algorithms.empty()) spec = config.algorithms.front();
  if (spec.per_sample()) throw InvalidArgument("arbitration needs a full-batch algorithm");

  std::vector<Sample> samples(config.trials);
  std::vector<std::string> sample_status(config.trials, "ok");
  for (std::size_t t = 0; t < config.trials; ++t) {
    Rng rng = make_stream(config.seed, "arbitration.sample", t);
    int attempts = 0;
    do {
      samples[t] = draw_sample(p, rng);
    } while (survivor_set(samples[t]).size() <= 2 * T && ++attempts < 1000);
    if (survivor_set(samples[t]).size() <= 2 * T) sample_status[t] = "skipped: |I(S)| <= 2T";
  }

  ArbitrationSweep out;
  out.summary.header = {"schema",           "experiment",        "seed",  "config_hash",       "algorithm",
                        "n",                "d",                 "T",     "eps",               "d2",
                        "trials",           "median_divergences", "mean_divergences", "mean_first_split",
                        "median_max_leakage", "status"};
  const std::string hash = config_hash(config);
  for (int d2 : config.d2) {
    std::vector<ArbitrationTrial> rows(config.trials);
    std::vector<char> ran(config.trials, 0);
    if (d2 >= p.dim()) {
      parallel_for(config.trials, [&](std::size_t t) {
        if (sample_status[t] != "ok") return;
        Rng urng = make_stream(config.seed, "arbitration.U/" + std::to_string(d2), t);
        const OrthoEmbedding e = sample_orthogonal(p.dim(), d2, urng);
        const auto factory = make_factory(spec, d2, T, p);
        const ArbitrationResult r =
            arbitration_divergence(factory, e, samples[t], T, stream_key(config.seed, "arbitration.alg", t));
        rows[t] = {d2, t, r.divergences, r.first_split, r.max_leakage};
        ran[t] = 1;
      });
    }
    std::vector<double> div, split, leak;
    for (std::size_t t = 0; t < config.trials; ++t) {
      if (!ran[t]) continue;
      out.trials.push_back(rows[t]);
      div.push_back(static_cast<double>(rows[t].divergences));
      split.push_back(static_cast<double>(rows[t].first_split));
      leak.push_back(rows[t].max_leakage);
    }
    const std::string status = d2 < p.dim() ? "skipped: d2 below d+2" : (div.empty() ? "skipped: no samples" : "ok");
    out.summary.rows.push_back({std::to_string(kCsvSchemaVersion), "arbitration", std::to_string(config.seed), hash,
                                spec.name, std::to_string(p.n), std::to_string(p.d), std::to_string(p.T),
                                format_number(p.eps), std::to_string(d2), std::to_string(div.size()),
                                format_number(median(div)), format_number(mean_and_std_error(div).first),
                                format_number(mean_and_std_error(split).first), format_number(median(leak)), status});
  }
  return out;
}

}  // namespace fblb
