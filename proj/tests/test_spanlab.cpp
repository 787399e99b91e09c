#include <doctest.h>

#include "fblb/optim.hpp"
#include "fblb/spanlab.hpp"
#include "generators.hpp"

using namespace fblb;

namespace {

Sample sample_with_survivors(const ConstructionParams& p, std::size_t need, Rng& rng) {
  for (;;) {
    Sample s = draw_sample(p, rng);
    if (survivor_set(s).size() > need) return s;
  }
}

}  // namespace

TEST_CASE("Gram-Schmidt basis is orthonormal and drops dependent generators") {
  Point a(3), b(3), c(3);
  a << 1, 1, 0;
  b << 2, 2, 0;
  c << 0, 1, 1;
  const SpanBasis B = SpanBasis::from_generators({a, b, c}, 3);
  CHECK(B.rank() == 2);
  CHECK((B.ortho.transpose() * B.ortho - Mat<double>::Identity(2, 2)).norm() < 1e-14);
  CHECK(span_residual(a, B) < 1e-14);
  CHECK(span_residual(c, B) < 1e-14);
  Point e(3);
  e << 1, -1, 1;
  CHECK(span_residual(e, B) > 0.1);
  const Point pe = project(e, B);
  CHECK((project(pe, B) - pe).norm() < 1e-14);
}

TEST_CASE("empty basis projects to zero") {
  const SpanBasis B = SpanBasis::from_generators({}, 4);
  CHECK(B.rank() == 0);
  CHECK(project(Point::Ones(4), B).isZero());
  CHECK(span_residual(Point::Ones(4), B) == doctest::Approx(2.0));
}

TEST_CASE("nearly parallel generators keep full rank after re-orthogonalization") {
  Rng rng = make_stream(1, "test.mgs");
  const int dim = 40;
  std::vector<Point> gens;
  Point base = Point::Random(dim);
  for (int j = 0; j < 20; ++j) {
    Point g = base;
    g(j) += 1e-6;
    gens.push_back(g);
  }
  const SpanBasis B = SpanBasis::from_generators(gens, dim);
  CHECK(B.rank() == 20);
  CHECK((B.ortho.transpose() * B.ortho - Mat<double>::Identity(20, 20)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("gradient at the origin is the sentinel generator") {
  Rng rng = make_stream(2, "test.origin");
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = canonical_params(0.25, 4, 64, 2);
    const Sample s = draw_sample(p, rng);
    const Point vbar = mean_perturbation(s);
    const GradientForm gf = match_gradient_form(full_batch_oracle(Point::Zero(p.dim()), s).grad, vbar, p);
    CHECK(gf.index == p.sentinel());
    CHECK(gf.residual <= 1e-12);
  }
}

TEST_CASE("match_gradient_form rejects other shapes") {
  const auto p = canonical_params(0.25, 4, 8, 1);
  const Point vbar = Point::Zero(p.dim());
  Point g = Point::Zero(p.dim());
  g(p.linear_coord()) = p.eps;
  g(2) = 0.5;
  CHECK(match_gradient_form(g, vbar, p).index == -1);
  g(2) = 1.0;
  CHECK(match_gradient_form(g, vbar, p).index == 2);
}

TEST_CASE("gradient descent stays in the survivor span and meets the gradient form") {
  Rng rng = make_stream(3, "test.spanlemma");
  for (int n : {2, 3})
    for (int T : {4, 8, 16})
      for (int seed = 0; seed < 8; ++seed) {
        const int d = static_cast<int>(std::max(16, 4 * T) * (1 << n));
        const auto p = canonical_params(0.25, T, d, n);
        const Sample s = sample_with_survivors(p, T, rng);
        const SurvivorSet I = survivor_set(s);
        const Point vbar = mean_perturbation(s);
        auto alg = projected_gd(p.dim(), {1.0 / std::sqrt(static_cast<double>(T))});
        const Trajectory tr =
            run_full_batch(*alg, [&](const Point& w) { return full_batch_oracle(w, s); }, T, rng);
        for (int t = 0; t < T; ++t) {
          CHECK(span_residual(tr.queries[t], build_basis(s, t)) <= 1e-9);
          const GradientForm gf = match_gradient_form(tr.answers[t].grad, vbar, p);
          CHECK(gf.residual <= 1e-9);
          CHECK(top_survivors(I, t + 1).contains(gf.index));
        }
      }
}

TEST_CASE("error lemma bound values") {
  CHECK(error_lemma_bound(4, 0.25) == doctest::Approx(-0.125));
  // 1 - 2 * 0.25 * 4 = -1.
  CHECK(error_lemma_bound(16, 0.5) == doctest::Approx(-1.25));
}

TEST_CASE("error lemma precondition") {
  auto p = canonical_params(0.25, 8, 128, 2);
  CHECK_FALSE(error_lemma_precondition(p, 8).has_value());
  p.gamma2 = 0.25 / std::sqrt(4.0 * 8) * 1.01;
  CHECK(error_lemma_precondition(p, 8).has_value());
  p = canonical_params(0.25, 8, 128, 2);
  p.gamma1 = 4 * p.n * p.eps * p.gamma2;
  CHECK(error_lemma_precondition(p, 8).has_value());
  Rng rng = make_stream(4, "test.refuse");
  const Sample s = sample_with_survivors(p, 8, rng);
  CHECK_THROWS_AS(minimize_surrogate_over_span(build_basis(s, 2), p, {}, rng), PreconditionViolated);
}

TEST_CASE("surrogate value by hand") {
  auto p = canonical_params(0.25, 1, 2, 1);
  p.gamma2 = 0.1;
  Point w(4);
  w << -0.4, -0.5, 0.0, -0.2;
  // ½ sqrt(0.3² + 0.4²) - 0.05.
  CHECK(surrogate_value(w, p) == doctest::Approx(0.25 - 0.05));
}

TEST_CASE("surrogate minimum on a one-dimensional span matches a grid search") {
  Rng rng = make_stream(5, "test.grid");
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = canonical_params(0.25, 8, 128, 2);
    const Sample s = sample_with_survivors(p, 8, rng);
    for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
      const SpanBasis B = build_basis(s, k);
      if (B.rank() != static_cast<Eigen::Index>(k)) continue;
      const SurrogateMinimum m = minimize_surrogate_over_span(B, p, {}, rng);
      CHECK(m.w.norm() <= 1 + 1e-12);
      CHECK(span_residual(m.w, B) < 1e-12);
      CHECK(surrogate_value(m.w, p) == doctest::Approx(m.value));
      if (k != 1) continue;
      const Point u = B.ortho.col(0);
      double grid = surrogate_value(Point::Zero(p.dim()), p);
      for (int j = -20000; j <= 20000; ++j) grid = std::min(grid, surrogate_value(Point(j / 20000.0 * u), p));
      CHECK(m.value <= grid + 1e-6);
      CHECK(m.value >= grid - 1e-3);
    }
  }
}

TEST_CASE("surrogate minimum respects the error lemma bound") {
  Rng rng = make_stream(6, "test.errlemma");
  for (int seed = 0; seed < 3; ++seed) {
    const auto p = canonical_params(0.25, 8, 128, 2);
    const Sample s = sample_with_survivors(p, 8, rng);
    for (std::size_t k = 0; k <= 8; k += 4) {
      const SurrogateMinimum m = minimize_surrogate_over_span(build_basis(s, k), p, {8, 500}, rng);
      CHECK(m.value >= error_lemma_bound(p.T, p.eps) - 1e-6);
    }
  }
}

TEST_CASE("resilience radius formula") {
  const auto p = canonical_params(0.25, 4, 64, 2);
  const double expect = std::min(p.gamma2 / 3, p.gamma1 * p.gamma3 / (16.0 * 64 * 2)) / (4 * 8.0);
  CHECK(resilience_radius(p) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("oracle is blind to admissible perturbations along the trajectory") {
  Rng rng = make_stream(7, "test.resilience");
  for (int seed = 0; seed < 5; ++seed) {
    const auto p = canonical_params(0.25, 4, 64, 2);
    const Sample s = sample_with_survivors(p, 5, rng);
    auto alg = projected_gd(p.dim(), {0.05});
    const Trajectory tr = run_full_batch(*alg, [&](const Point& w) { return full_batch_oracle(w, s); }, 4, rng);
    for (std::size_t t = 0; t < 4; ++t) {
      const ResilienceResult r = resilience_check(tr.queries[t], s, t, 200, rng);
      CHECK(r.trials == 200);
      CHECK(r.violations == 0);
    }
  }
}

TEST_CASE("resilience check refuses bad inputs") {
  const auto p = canonical_params(0.25, 4, 64, 2);
  Rng rng = make_stream(8, "test.resrefuse");
  const Sample s = sample_with_survivors(p, 5, rng);
  Point off = Point::Zero(p.dim());
  off(p.linear_coord()) = 0.3;
  CHECK_THROWS_AS(resilience_check(off, s, 1, 10, rng), PreconditionViolated);
  const std::size_t m = survivor_set(s).size();
  CHECK_THROWS_AS(resilience_check(Point::Zero(p.dim()), s, m - 1, 10, rng), PreconditionViolated);
}
