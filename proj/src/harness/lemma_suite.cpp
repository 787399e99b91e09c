#include <algorithm>
#include <cmath>
#include <optional>

#include "fblb/harness.hpp"

namespace fblb {

namespace {

using nlohmann::json;

struct Tally {
  std::string id;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_residual = 0.0;
  std::optional<std::string> refused;

  explicit Tally(std::string name) : id(std::move(name)) {}

  void record(double residual, double tol) {
    ++trials;
    max_residual = std::max(max_residual, residual);
    if (!(residual <= tol)) ++violations;
  }

  [[nodiscard]] json to_json() const {
    json j{{"id", id}, {"trials", trials}, {"violations", violations}, {"max_residual", max_residual}};
    if (refused) {
      j["status"] = "refused";
      j["reason"] = *refused;
    } else {
      j["status"] = violations == 0 ? "pass" : "fail";
    }
    return j;
  }
};

Point random_in_ball(Eigen::Index dim, Rng& rng) {
  Point w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) w(i) = rng.normal();
  return w.normalized() * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
}

// Small-scale point: coordinates near the hinge kink and the Nemirovski offsets.
Point random_near_origin(const ConstructionParams& p, Rng& rng) {
  Point w(p.dim());
  const double scale = 4.0 * p.gamma2;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-scale, scale);
  return project_unit_ball(w);
}

Sample draw_with_survivors(const ConstructionParams& p, std::size_t need, Rng& rng) {
  Sample s;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    s = draw_sample(p, rng);
    if (survivor_set(s).size() > need) return s;
  }
  throw InsufficientSurvivors("could not draw a sample with more than " + std::to_string(need) + " survivors");
}

ConstructionParams suite_params(const ExperimentConfig& config) {
  if (config.instance) return *config.instance;
  const int n = config.grid.n.front();
  const int T = std::max(1, config.grid.T.front());
  const long long d = config.grid.d ? *config.grid.d : concentration_dimension(n, T);
  return canonical_params(config.grid.eps.front(), T, static_cast<int>(d), n);
}

std::optional<std::string> span_regime(const ConstructionParams& p) {
  const ConstructionParams canon = canonical_params(p.eps, p.T, p.d, p.n);
  if (p.variant != Variant::Full) return "span arguments need the full variant";
  if (p.gamma2 > p.eps / std::sqrt(4.0 * p.T)) return "gamma2 exceeds eps/sqrt(4T)";
  if (!(p == canon)) return "parameters are not the canonical choice";
  return std::nullopt;
}

void instance_properties(const ConstructionParams& base, std::size_t trials, std::uint64_t seed, json& out) {
  for (Variant v : {Variant::Simple, Variant::Full}) {
    ConstructionParams p = base;
    p.variant = v;
    const std::string tag = "/" + to_string(v);
    Tally convex{"loss.convexity" + tag}, subgrad{"loss.subgradient_inequality" + tag},
        lip{"loss.lipschitz" + tag};
    Rng rng = make_stream(seed, "suite.instance" + tag);
    const double L = loss_lipschitz_bound(p);
    for (std::size_t t = 0; t < trials; ++t) {
      const Sample s = draw_sample(p, rng);
      const SamplePoint& z = s.points.front();
      for (int rep = 0; rep < 4; ++rep) {
        const Point a = rep % 2 ? random_in_ball(p.dim(), rng) : random_near_origin(p, rng);
        const Point b = rep % 2 ? random_in_ball(p.dim(), rng) : random_near_origin(p, rng);
        const double lam = rng.uniform();
        const double fa = loss_value(a, z, p), fb = loss_value(b, z, p);
        const Point mid = lam * a + (1 - lam) * b;
        convex.record(loss_value(mid, z, p) - (lam * fa + (1 - lam) * fb), 1e-12);
        const Point ga = loss_subgrad(a, z, p);
        subgrad.record(fa + ga.dot(b - a) - fb, 1e-12);
        lip.record(std::abs(fa - fb) - L * (a - b).norm(), 1e-12);
        lip.record(ga.norm() - L, 1e-12);
      }
    }
    for (const auto* t : {&convex, &subgrad, &lip}) out.push_back(t->to_json());
  }

  Tally mono{"hinge.monotone"};
  Rng rng = make_stream(seed, "suite.hinge");
  for (std::size_t t = 0; t < trials; ++t) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    const double lo = std::min(a, b), hi = std::max(a, b);
    mono.record(hinge(lo, base.gamma2) - hinge(hi, base.gamma2), 0.0);
    mono.record(hinge(hi, base.gamma2), 0.0);
  }
  out.push_back(mono.to_json());
}

void sampling_properties(const ConstructionParams& p, std::size_t trials, std::uint64_t seed, json& out) {
  Tally vbar{"sampling.mean_perturbation"}, nested{"sampling.top_survivors_nested"};
  Rng rng = make_stream(seed, "suite.sampling");
  for (std::size_t t = 0; t < trials; ++t) {
    const Sample s = draw_sample(p, rng);
    const SurvivorSet I = survivor_set(s);
    const Point v = mean_perturbation(s);
    double worst = 0.0;
    for (int i = 0; i < p.d; ++i) {
      const double expected = -1.0 / (2.0 * p.n);
      if (I.contains(i))
        worst = std::max(worst, std::abs(v(i) - expected));
      else if (!(v(i) > expected))
        worst = std::max(worst, 1.0);
    }
    vbar.record(worst, 0.0);
    bool ok = I.contains(p.sentinel());
    for (std::size_t k = 1; k <= I.size(); ++k) {
      const auto small = top_survivors(I, k - 1), big = top_survivors(I, k);
      ok = ok && std::includes(big.indices.begin(), big.indices.end(), small.indices.begin(), small.indices.end());
    }
    nested.record(ok ? 0.0 : 1.0, 0.0);
  }
  out.push_back(vbar.to_json());
  out.push_back(nested.to_json());
}

void oracle_properties(const ConstructionParams& p, std::size_t trials, std::uint64_t seed, json& out) {
  Tally purity{"oracle.purity"}, average{"oracle.per_sample_average"}, mc{"risk.monte_carlo_vs_exact"},
      ref{"risk.reference_value"};
  Rng rng = make_stream(seed, "suite.oracle");
  for (std::size_t t = 0; t < trials; ++t) {
    const Sample s = draw_sample(p, rng);
    const Point w = random_near_origin(p, rng);
    const OracleAnswer a = full_batch_oracle(w, s), b = full_batch_oracle(w, s);
    purity.record(same_answer(a, b, 0.0) ? 0.0 : 1.0, 0.0);
    Point g = Point::Zero(p.dim());
    double f = 0.0;
    for (const auto& z : s.points) {
      const OracleAnswer one = sample_oracle(w, z, p);
      g += one.grad;
      f += one.value;
    }
    g /= static_cast<double>(s.size());
    f /= static_cast<double>(s.size());
    average.record(std::max((g - a.grad).lpNorm<Eigen::Infinity>(), std::abs(f - a.value)), 1e-12);
  }
  for (std::size_t t = 0; t < std::min<std::size_t>(trials, 8); ++t) {
    Point w = Point::Zero(p.dim());
    const int active = std::min(p.d, 6);
    for (int i = 0; i < active; ++i) w(static_cast<Eigen::Index>(rng.uniform() * p.d)) = -rng.uniform(0.05, 0.3);
    w = project_unit_ball(w);
    const RiskEstimate exact = population_risk(w, p);
    Rng mrng = make_stream(seed, "suite.risk_mc", t);
    const RiskEstimate est = population_risk(w, p, RiskMode::monte_carlo(20000), mrng);
    mc.record(std::abs(est.mean - exact.mean) - 5.0 * est.std_error, 1e-12);
  }
  if (p.variant == Variant::Full) ref.record(std::abs(population_risk(reference_point(p), p).mean + 7.0 * p.eps / 8.0), 1e-12);
  for (const auto* x : {&purity, &average, &mc}) out.push_back(x->to_json());
  if (ref.trials) out.push_back(ref.to_json());
}

void span_properties(const ConstructionParams& p, const ExperimentConfig& config, json& out) {
  const auto T = static_cast<std::size_t>(p.T);
  const std::size_t trials = config.trials;
  Tally queries{"span.queries_in_span"}, form{"span.gradient_form"}, gvanish{"span.g_gradient_vanishes"},
      support{"span.nemirovski_support"}, err{"span.error_lemma"}, res{"span.resilience"};
  const auto regime = span_regime(p);
  if (regime) {
    for (auto* x : {&queries, &form, &gvanish, &support, &err, &res}) {
      x->refused = *regime;
      out.push_back(x->to_json());
    }
    return;
  }
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(config.seed, "suite.span", t);
    const Sample s = draw_with_survivors(p, T + 1, rng);
    const SurvivorSet I = survivor_set(s);
    const Point vbar = mean_perturbation(s);
    auto alg = projected_gd(p.dim(), {1.0 / std::sqrt(static_cast<double>(T))});
    Rng arng = make_stream(config.seed, "suite.span.alg", t);
    const Trajectory tr = run_full_batch(*alg, [&](const Point& w) { return full_batch_oracle(w, s); }, T, arng);
    for (std::size_t i = 0; i < T; ++i) {
      const Point& w = tr.queries[i];
      queries.record(span_residual(w, build_basis(s, i)), 1e-9);
      const GradientForm gf = match_gradient_form(tr.answers[i].grad, vbar, p);
      const auto allowed = top_survivors(I, i + 1);
      form.record(gf.index >= 0 && allowed.contains(gf.index) ? gf.residual : 1.0 + gf.residual, 1e-9);
      double gnorm = 0.0;
      for (const auto& z : s.points) gnorm = std::max(gnorm, g_subgrad(w, z.alpha, p.gamma2).norm());
      gvanish.record(gnorm, 0.0);
      const Point r = nemirovski_subgrad(w, p);
      Eigen::Index k = -1;
      r.maxCoeff(&k);
      support.record(r.norm() == 1.0 && allowed.contains(k) ? 0.0 : 1.0, 0.0);
      if (i + 1 < I.size() && w.norm() < 0.5) {
        Rng rrng = make_stream(config.seed, "suite.resilience", t * T + i);
        const ResilienceResult rr = resilience_check(w, s, i, 16, rrng);
        res.trials += rr.trials;
        res.violations += rr.violations;
        res.max_residual = std::max(res.max_residual, rr.max_value_gap);
      }
    }
    if (t < 4) {
      Rng srng = make_stream(config.seed, "suite.surrogate", t);
      const SpanBasis basis = build_basis(s, T);
      const SurrogateMinimum m = minimize_surrogate_over_span(basis, p, config.surrogate, srng);
      err.record(error_lemma_bound(p.T, p.eps) - m.value, 1e-9);
    }
  }
  for (const auto* x : {&queries, &form, &gvanish, &support, &err, &res}) out.push_back(x->to_json());
}

void embed_properties(const ConstructionParams& p, std::size_t trials, std::uint64_t seed, json& out) {
  Tally iso{"embed.isometry"}, comp{"embed.composition"};
  const Eigen::Index d2 = 2 * p.dim();
  for (std::size_t t = 0; t < std::min<std::size_t>(trials, 8); ++t) {
    Rng rng = make_stream(seed, "suite.embed", t);
    const OrthoEmbedding e = sample_orthogonal(p.dim(), d2, rng);
    iso.record((e.U.transpose() * e.U - Mat<double>::Identity(p.dim(), p.dim())).lpNorm<Eigen::Infinity>(), 1e-10);
    const Sample s = draw_sample(p, rng);
    Point w(d2);
    for (Eigen::Index i = 0; i < d2; ++i) w(i) = rng.normal();
    w = 0.5 * w.normalized();
    const OracleAnswer a = embedded_oracle(w, e, s);
    const OracleAnswer b = full_batch_oracle(Point(e.U.transpose() * w), s);
    comp.record(std::max((a.grad - e.U * b.grad).lpNorm<Eigen::Infinity>(), std::abs(a.value - b.value)), 1e-12);
  }
  out.push_back(iso.to_json());
  out.push_back(comp.to_json());
}

void optim_properties(const ConstructionParams& p, std::size_t trials, std::uint64_t seed, json& out) {
  Tally det{"optim.deterministic_replay"};
  for (std::size_t t = 0; t < std::min<std::size_t>(trials, 8); ++t) {
    Rng srng = make_stream(seed, "suite.optim.sample", t);
    const Sample s = draw_sample(p, srng);
    const OracleFn oracle = [&](const Point& w) { return full_batch_oracle(w, s); };
    auto run = [&] {
      auto alg = noisy_gd(p.dim(), {0.1}, 0.01);
      Rng rng = make_stream(seed, "suite.optim.alg", t);
      return run_full_batch(*alg, oracle, static_cast<std::size_t>(p.T), rng);
    };
    const Trajectory a = run(), b = run();
    bool same = a.queries.size() == b.queries.size() && a.output == b.output;
    for (std::size_t i = 0; same && i < a.queries.size(); ++i) same = a.queries[i] == b.queries[i];
    det.record(same ? 0.0 : 1.0, 0.0);
  }
  out.push_back(det.to_json());
}

}  // namespace

nlohmann::json run_lemma_suite(const ExperimentConfig& config) {
  config.validate();
  const ConstructionParams p = suite_params(config);
  p.validate();
  json props = json::array();
  instance_properties(p, config.trials, config.seed, props);
  sampling_properties(p, config.trials, config.seed, props);
  oracle_properties(p, config.trials, config.seed, props);
  span_properties(p, config, props);
  embed_properties(p, config.trials, config.seed, props);
  optim_properties(p, config.trials, config.seed, props);

  std::size_t failed = 0, refused = 0;
  for (const auto& x : props) {
    failed += x["status"] == "fail";
    refused += x["status"] == "refused";
  }
  return json{{"experiment", "lemma_suite"},
              {"seed", config.seed},
              {"config_hash", config_hash(config)},
              {"params", to_json(p)},
              {"properties", props},
              {"failed", failed},
              {"refused", refused}};
}

}  // namespace fblb
