#include "fblb/spanlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fblb {

SpanBasis SpanBasis::from_generators(std::vector<Point> generators, Eigen::Index dim) {
  SpanBasis b;
  std::vector<Point> cols;
  for (const auto& g : generators) {
    if (g.size() != dim) throw InvalidArgument("generator has the wrong dimension");
    Point v = g;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : cols) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm < 1e-12) continue;
    cols.push_back(v / norm);
  }
  b.ortho.resize(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) b.ortho.col(static_cast<Eigen::Index>(j)) = cols[j];
  b.generators = std::move(generators);
  return b;
}

SpanBasis build_basis(const Point& vbar, const ConstructionParams& params, const SurvivorSet& index_set) {
  Point common = params.gamma1 * vbar;
  common(params.linear_coord()) += params.eps;
  std::vector<Point> gens;
  gens.reserve(index_set.size());
  for (auto i : index_set.indices) {
    Point g = common;
    g(i) += 1.0;
    gens.push_back(std::move(g));
  }
  SpanBasis b = SpanBasis::from_generators(std::move(gens), params.dim());
  b.index_set = index_set;
  return b;
}

SpanBasis build_basis(const Sample& s, std::size_t k) {
  return build_basis(mean_perturbation(s), s.params, top_survivors(survivor_set(s), k));
}

GradientForm match_gradient_form(const Point& grad, const Point& vbar, const ConstructionParams& params, double tol) {
  Point rem = grad - params.gamma1 * vbar;
  rem(params.linear_coord()) -= params.eps;
  Eigen::Index k = 0;
  rem.maxCoeff(&k);
  Point err = rem;
  err(k) -= 1.0;
  GradientForm out;
  out.residual = err.lpNorm<Eigen::Infinity>();
  out.index = out.residual <= tol ? k : -1;
  return out;
}

double error_lemma_bound(int T, double eps) {
  return std::min(1.0 - 2.0 * eps * eps * std::sqrt(static_cast<double>(T)), 0.0) - 0.5 * eps;
}

std::optional<std::string> error_lemma_precondition(const ConstructionParams& params, std::size_t k) {
  const double kk = static_cast<double>(std::max<std::size_t>(k, 1));
  if (params.gamma1 > 2.0 * params.n * params.eps * params.gamma2)
    return "gamma1 exceeds 2*n*eps*gamma2";
  if (params.gamma2 > params.eps / std::sqrt(4.0 * kk))
    return "gamma2 exceeds eps/sqrt(4T) for T=" + std::to_string(static_cast<std::size_t>(kk));
  return std::nullopt;
}

double surrogate_value(const Point& w, const ConstructionParams& params) {
  double acc = 0.0;
  for (int i = 0; i < params.d; ++i) {
    const double h = hinge(w(i), params.gamma2);
    acc += h * h;
  }
  return 0.5 * std::sqrt(acc) + params.eps * w(params.linear_coord());
}

namespace {

Point surrogate_subgrad(const Point& w, const ConstructionParams& params) {
  Point g = Point::Zero(w.size());
  double acc = 0.0;
  for (int i = 0; i < params.d; ++i) {
    const double h = hinge(w(i), params.gamma2);
    g(i) = h;
    acc += h * h;
  }
  if (acc > 0.0)
    g.head(params.d) *= 0.5 / std::sqrt(acc);
  else
    g.head(params.d).setZero();
  g(params.linear_coord()) = params.eps;
  return g;
}

}  // namespace

SurrogateMinimum minimize_surrogate_over_span(const SpanBasis& basis, const ConstructionParams& params,
                                              const SurrogateBudget& budget, Rng& rng) {
  if (auto why = error_lemma_precondition(params, basis.index_set.size()))
    throw PreconditionViolated("error lemma regime violated: " + *why);
  SurrogateMinimum best{Point::Zero(params.dim()), 0.0};
  best.value = surrogate_value(best.w, params);
  const Eigen::Index k = basis.rank();
  if (k == 0) return best;

  for (int r = 0; r < budget.restarts; ++r) {
    Vec<double> c = Vec<double>::Zero(k);
    if (r > 0) {
      for (Eigen::Index j = 0; j < k; ++j) c(j) = rng.normal();
      c *= std::pow(rng.uniform(), 1.0 / static_cast<double>(k)) / c.norm();
    }
    for (int s = 1; s <= budget.steps; ++s) {
      const Point w = basis.ortho * c;
      const double val = surrogate_value(w, params);
      if (val < best.value) best = {w, val};
      const Vec<double> g = basis.ortho.transpose() * surrogate_subgrad(w, params);
      c = project_unit_ball(Vec<double>(c - g / std::sqrt(static_cast<double>(s))));
    }
    const Point w = basis.ortho * c;
    const double val = surrogate_value(w, params);
    if (val < best.value) best = {w, val};
  }
  return best;
}

double resilience_radius(const ConstructionParams& params) {
  const double d = params.d;
  return std::min(params.gamma2 / 3.0, params.gamma1 * params.gamma3 / (16.0 * d * params.n)) / (4.0 * std::sqrt(d));
}

ResilienceResult resilience_check(const Point& w_t, const Sample& s, std::size_t t, std::size_t trials, Rng& rng) {
  const auto& p = s.params;
  const SurvivorSet survivors = survivor_set(s);
  if (survivors.size() <= t + 1)
    throw PreconditionViolated("need more than t+1 survivors, have " + std::to_string(survivors.size()));
  const Point vbar = mean_perturbation(s);
  const SpanBasis current = build_basis(vbar, p, top_survivors(survivors, t));
  const SpanBasis next = build_basis(vbar, p, top_survivors(survivors, t + 1));
  if (span_residual(w_t, current) > 1e-9) throw PreconditionViolated("w_t is not in the span of the t largest survivors");
  const double radius = resilience_radius(p);
  if (w_t.norm() + radius * std::sqrt(static_cast<double>(p.dim())) > 1.0)
    throw PreconditionViolated("w_t too close to the unit sphere for admissible perturbations");

  ResilienceResult out;
  out.trials = trials;
  for (std::size_t j = 0; j < trials; ++j) {
    Point q(p.dim());
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = rng.uniform(-radius, radius);
    if (j == 0) q.setZero();
    const Point w = w_t + q;
    const OracleAnswer direct = full_batch_oracle(w, s);
    const OracleAnswer projected = full_batch_oracle(project(w, next), s);
    out.max_value_gap = std::max(out.max_value_gap, std::abs(direct.value - projected.value));
    if (!same_answer(direct, projected)) ++out.violations;
  }
  return out;
}

}  // namespace fblb
