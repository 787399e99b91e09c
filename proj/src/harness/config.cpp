#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fblb/harness.hpp"

namespace fblb {

using nlohmann::json;

StepSchedule AlgorithmSpec::schedule_for(std::size_t T) const {
  StepSchedule s = eta;
  if (eta_from_T) s.eta = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(T, 1)));
  return s;
}

AlgorithmFactory make_factory(const AlgorithmSpec& spec, Eigen::Index dim, std::size_t T,
                              const ConstructionParams& params) {
  const StepSchedule eta = spec.schedule_for(T);
  if (spec.name == "projected_gd")
    return [=] { return projected_gd(dim, eta, spec.averaging); };
  if (spec.name == "regularized_gd")
    return [=] { return regularized_gd(dim, spec.lambda, eta, spec.form, spec.averaging); };
  if (spec.name == "noisy_gd")
    return [=] { return noisy_gd(dim, eta, spec.noise_std, spec.averaging); };
  if (spec.name == "heavy_ball")
    return [=] { return heavy_ball(dim, eta, spec.momentum, spec.averaging); };
  if (spec.name == "zero")
    return [=] { return constant_algorithm(Point::Zero(dim), Point::Zero(dim)); };
  if (spec.name == "reference") {
    if (dim != params.dim()) throw InvalidArgument("the reference algorithm only runs on the unembedded instance");
    return [=] { return constant_algorithm(Point::Zero(dim), reference_point(params)); };
  }
  if (spec.name == "sgd") throw InvalidArgument("sgd is not a full-batch algorithm");
  throw InvalidArgument("unknown algorithm '" + spec.name + "'");
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kinds{"separation", "lemma_suite", "concentration", "leakage", "arbitration"};
  if (std::find(kinds.begin(), kinds.end(), experiment) == kinds.end())
    throw InvalidArgument("unknown experiment '" + experiment + "'");
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (instance) instance->validate();
  if (grid.n.empty() || grid.T.empty() || grid.eps.empty()) throw InvalidArgument("grid axes must be non-empty");
  for (int n : grid.n)
    if (n < 1) throw InvalidArgument("grid n must be positive");
  for (int T : grid.T)
    if (T < 0) throw InvalidArgument("grid T must be non-negative");
  for (double e : grid.eps)
    if (!(e > 0)) throw InvalidArgument("grid eps must be positive");
  if (experiment == "separation" && algorithms.empty()) throw InvalidArgument("separation needs algorithms");
  if (experiment == "arbitration" && d2.empty()) throw InvalidArgument("arbitration needs a d2 sweep");
  for (const auto& a : algorithms) {
    if (a.per_sample()) continue;
    ConstructionParams p;
    (void)make_factory(a, p.dim(), 1, p);  // validates the name
  }
  if (risk_mode.kind == RiskMode::Kind::MonteCarlo && risk_mode.samples < 2)
    throw InvalidArgument("monte_carlo needs at least two draws");
}

json to_json(const ConstructionParams& p) {
  return json{{"n", p.n},           {"d", p.d},           {"T", p.T},           {"eps", p.eps},
              {"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"gamma3", p.gamma3}, {"variant", to_string(p.variant)}};
}

ConstructionParams params_from_json(const json& j) {
  const double eps = j.at("eps").get<double>();
  const int T = j.at("T").get<int>();
  const int d = j.at("d").get<int>();
  const int n = j.at("n").get<int>();
  ConstructionParams p = canonical_params(eps, T, d, n);
  if (j.contains("gamma1")) p.gamma1 = j.at("gamma1").get<double>();
  if (j.contains("gamma2")) p.gamma2 = j.at("gamma2").get<double>();
  if (j.contains("gamma3")) p.gamma3 = j.at("gamma3").get<double>();
  if (j.contains("variant")) p.variant = variant_from_string(j.at("variant").get<std::string>());
  p.validate();
  return p;
}

json to_json(const AlgorithmSpec& a) {
  json j{{"name", a.name}, {"averaging", to_string(a.averaging)},
         {"schedule", a.eta.decay == StepSchedule::Decay::Constant ? "constant" : "inv_sqrt"}};
  if (a.eta_from_T)
    j["eta"] = "1/sqrt(T)";
  else
    j["eta"] = a.eta.eta;
  if (a.name == "regularized_gd") {
    j["lambda"] = a.lambda;
    j["form"] = a.form == RegularizedForm::Proximal ? "proximal" : "as_written";
  }
  if (a.name == "noisy_gd") j["noise_std"] = a.noise_std;
  if (a.name == "heavy_ball") j["momentum"] = a.momentum;
  return j;
}

AlgorithmSpec algorithm_from_json(const json& j) {
  AlgorithmSpec a;
  a.name = j.at("name").get<std::string>();
  if (j.contains("eta") && j.at("eta").is_number()) {
    a.eta.eta = j.at("eta").get<double>();
    a.eta_from_T = false;
  }
  if (j.contains("schedule")) {
    const auto s = j.at("schedule").get<std::string>();
    if (s == "constant")
      a.eta.decay = StepSchedule::Decay::Constant;
    else if (s == "inv_sqrt")
      a.eta.decay = StepSchedule::Decay::InvSqrt;
    else
      throw InvalidArgument("unknown schedule '" + s + "'");
  }
  if (j.contains("averaging")) a.averaging = averaging_from_string(j.at("averaging").get<std::string>());
  a.lambda = j.value("lambda", 0.0);
  if (j.contains("form")) {
    const auto f = j.at("form").get<std::string>();
    if (f == "proximal")
      a.form = RegularizedForm::Proximal;
    else if (f == "as_written")
      a.form = RegularizedForm::AsWritten;
    else
      throw InvalidArgument("unknown regularized form '" + f + "'");
  }
  a.noise_std = j.value("noise_std", 0.0);
  a.momentum = j.value("momentum", 0.0);
  return a;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  if (c.instance) j["instance"] = to_json(*c.instance);
  j["grid"] = json{{"n", c.grid.n}, {"T", c.grid.T}, {"eps", c.grid.eps}};
  if (c.grid.d) j["grid"]["d"] = *c.grid.d;
  j["algorithms"] = json::array();
  for (const auto& a : c.algorithms) j["algorithms"].push_back(to_json(a));
  if (c.risk_mode.kind == RiskMode::Kind::Exact)
    j["risk_mode"] = "exact";
  else
    j["risk_mode"] = json{{"monte_carlo", c.risk_mode.samples}};
  j["fallback_mc_samples"] = c.fallback_mc_samples;
  j["leakage"] = json{{"d", c.leakage.d},   {"k", c.leakage.k}, {"d2", c.leakage.d2},
                      {"c", c.leakage.c},   {"embeddings", c.leakage.embeddings}};
  j["d2"] = c.d2;
  j["surrogate"] = json{{"restarts", c.surrogate.restarts}, {"steps", c.surrogate.steps}};
  j["max_d"] = c.max_d;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  if (!j.contains("seed")) throw InvalidArgument("config must set a seed");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.trials = j.value("trials", std::size_t{1});
  if (j.contains("instance")) c.instance = params_from_json(j.at("instance"));
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("n")) c.grid.n = g.at("n").get<std::vector<int>>();
    if (g.contains("T")) c.grid.T = g.at("T").get<std::vector<int>>();
    if (g.contains("eps")) c.grid.eps = g.at("eps").get<std::vector<double>>();
    if (g.contains("d") && !g.at("d").is_null()) c.grid.d = g.at("d").get<int>();
  }
  if (j.contains("algorithms"))
    for (const auto& a : j.at("algorithms")) c.algorithms.push_back(algorithm_from_json(a));
  if (j.contains("risk_mode")) {
    const auto& m = j.at("risk_mode");
    if (m.is_string() && m.get<std::string>() == "exact")
      c.risk_mode = RiskMode::exact();
    else if (m.is_object() && m.contains("monte_carlo"))
      c.risk_mode = RiskMode::monte_carlo(m.at("monte_carlo").get<std::size_t>());
    else
      throw InvalidArgument("risk_mode must be \"exact\" or {\"monte_carlo\": m}");
  }
  c.fallback_mc_samples = j.value("fallback_mc_samples", c.fallback_mc_samples);
  if (j.contains("leakage")) {
    const auto& l = j.at("leakage");
    c.leakage.d = l.value("d", c.leakage.d);
    c.leakage.k = l.value("k", c.leakage.k);
    if (l.contains("d2")) c.leakage.d2 = l.at("d2").get<std::vector<int>>();
    if (l.contains("c")) c.leakage.c = l.at("c").get<std::vector<double>>();
    c.leakage.embeddings = l.value("embeddings", c.leakage.embeddings);
  }
  if (j.contains("d2")) c.d2 = j.at("d2").get<std::vector<int>>();
  if (j.contains("surrogate")) {
    c.surrogate.restarts = j.at("surrogate").value("restarts", c.surrogate.restarts);
    c.surrogate.steps = j.at("surrogate").value("steps", c.surrogate.steps);
  }
  c.max_d = j.value("max_d", c.max_d);
  c.validate();
  return c;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

long long concentration_dimension(int n, int T) {
  return std::max(16LL, 4LL * T) * (1LL << n);
}

}  // namespace fblb
