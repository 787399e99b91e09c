#include <doctest.h>

#include "fblb/optim.hpp"
#include "generators.hpp"

using namespace fblb;

namespace {

// ½‖w - c‖², gradient w - c.
OracleFn quadratic(Point c) {
  return [c](const Point& w) { return OracleAnswer{w - c, 0.5 * (w - c).squaredNorm()}; };
}

Point vec2(double a, double b) {
  Point p(2);
  p << a, b;
  return p;
}

}  // namespace

TEST_CASE("step schedules") {
  StepSchedule c{0.3};
  CHECK(c.at(1) == 0.3);
  CHECK(c.at(9) == 0.3);
  StepSchedule s{0.3, StepSchedule::Decay::InvSqrt};
  CHECK(s.at(1) == doctest::Approx(0.3));
  CHECK(s.at(4) == doctest::Approx(0.15));
}

TEST_CASE("averaging names") {
  CHECK(averaging_from_string("last") == Averaging::Last);
  CHECK(averaging_from_string(to_string(Averaging::Uniform)) == Averaging::Uniform);
  CHECK_THROWS_AS(averaging_from_string("median"), InvalidArgument);
}

TEST_CASE("projected GD iterates on a quadratic") {
  // w_{t+1} = w_t - 0.5 (w_t - c) from 0: w_t = (1 - 2^{-t}) c.
  const Point c = vec2(0.4, -0.2);
  auto alg = projected_gd(2, {0.5}, Averaging::Last);
  Rng rng = make_stream(1, "test.gd");
  const Trajectory tr = run_full_batch(*alg, quadratic(c), 3, rng);
  CHECK(tr.oracle_calls == 3);
  REQUIRE(tr.queries.size() == 3);
  REQUIRE(tr.iterates.size() == 3);
  CHECK(tr.queries[0].isZero());
  for (int t = 1; t <= 3; ++t) CHECK((tr.iterates[t - 1] - (1 - std::ldexp(1.0, -t)) * c).norm() < 1e-15);
  CHECK(tr.output == tr.iterates.back());

  auto avg = projected_gd(2, {0.5});
  Rng rng2 = make_stream(1, "test.gd");
  const Trajectory ta = run_full_batch(*avg, quadratic(c), 3, rng2);
  const Point mean = (0.5 + 0.75 + 0.875) / 3 * c;
  CHECK((ta.output - mean).norm() < 1e-15);
}

TEST_CASE("projection keeps GD in the ball") {
  auto alg = projected_gd(2, {1.0}, Averaging::Last);
  Rng rng = make_stream(2, "test.proj");
  const Trajectory tr = run_full_batch(*alg, quadratic(vec2(3, 4)), 2, rng);
  CHECK((tr.iterates[0] - vec2(0.6, 0.8)).norm() < 1e-15);
  CHECK(tr.domain_violations == 0);
}

TEST_CASE("out-of-ball queries are counted and projected") {
  auto alg = constant_algorithm(vec2(3, 4), vec2(0, 0));
  Rng rng = make_stream(3, "test.violations");
  std::vector<Point> seen;
  const Trajectory tr = run_full_batch(
      *alg,
      [&](const Point& w) {
        seen.push_back(w);
        return OracleAnswer{Point::Zero(2), 0.0};
      },
      4, rng);
  CHECK(tr.domain_violations == 5);
  for (const auto& w : seen) CHECK(w.norm() <= 1 + 1e-12);
  CHECK(tr.output.isZero());
}

TEST_CASE("regularized GD in both forms") {
  const Point c = vec2(0.4, 0.0);
  Rng rng = make_stream(4, "test.reg");
  auto prox = regularized_gd(2, 0.5, {0.5}, RegularizedForm::Proximal, Averaging::Last);
  const Trajectory tp = run_full_batch(*prox, quadratic(c), 1, rng);
  // (0 - 0.5 (0 - c)) / (1 + 0.5).
  CHECK((tp.iterates[0] - c / 3.0).norm() < 1e-15);
  auto raw = regularized_gd(2, 0.5, {0.5}, RegularizedForm::AsWritten, Averaging::Last);
  const Trajectory tw = run_full_batch(*raw, quadratic(c), 2, rng);
  // w1 = -0.5 (0 - c) = c/2; w2 = 0.5 * 1 * w1 - 0.5 (w1 - c) = c/2.
  CHECK((tw.iterates[0] - c / 2).norm() < 1e-15);
  CHECK((tw.iterates[1] - c / 2).norm() < 1e-15);
  CHECK_THROWS_AS(regularized_gd(2, -1.0, {0.5}), InvalidArgument);
}

TEST_CASE("heavy ball adds momentum from the second step") {
  const Point c = vec2(0.4, 0.0);
  auto alg = heavy_ball(2, {0.5}, 0.5, Averaging::Last);
  Rng rng = make_stream(5, "test.hb");
  const Trajectory tr = run_full_batch(*alg, quadratic(c), 2, rng);
  // w1 = c/2; w2 = w1 - 0.5 (w1 - c) + 0.5 (w1 - 0) = c.
  CHECK((tr.iterates[1] - c).norm() < 1e-15);
  CHECK_THROWS_AS(heavy_ball(2, {0.5}, 1.0), InvalidArgument);
}

TEST_CASE("noisy GD replays exactly from the same stream") {
  auto run = [](std::uint64_t key) {
    auto alg = noisy_gd(5, {0.1}, 0.3);
    Rng rng(key);
    return run_full_batch(*alg, quadratic(Point::Constant(5, 0.1)), 6, rng);
  };
  const Trajectory a = run(7), b = run(7), c = run(8);
  for (std::size_t t = 0; t < 6; ++t) CHECK(a.queries[t] == b.queries[t]);
  CHECK(a.output == b.output);
  CHECK_FALSE(a.output == c.output);
  CHECK_THROWS_AS(noisy_gd(5, {0.1}, -1.0), InvalidArgument);
}

TEST_CASE("noisy GD perturbation has the requested norm scale") {
  const int dim = 400;
  double sq = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    auto alg = noisy_gd(dim, {0.0}, 0.01);
    Rng rng = make_stream(6, "test.noise", r);
    const Trajectory tr = run_full_batch(*alg, quadratic(Point::Zero(dim)), 1, rng);
    sq += tr.iterates[0].squaredNorm();
  }
  CHECK(sq / reps == doctest::Approx(1e-4).epsilon(0.05));
}

TEST_CASE("SGD is one pass in a random order") {
  const auto p = canonical_params(0.25, 4, 64, 4);
  Rng rng = make_stream(7, "test.sgd");
  const Sample s = draw_sample(p, rng);
  const Trajectory tr = sgd({0.5}, s, rng);
  CHECK(tr.oracle_calls == 4);
  CHECK(tr.iterates.size() == 4);
  for (const auto& w : tr.iterates) CHECK(w.norm() <= 1 + 1e-12);
  Point mean = Point::Zero(p.dim());
  for (const auto& w : tr.iterates) mean += w;
  CHECK((tr.output - mean / 4).norm() < 1e-15);
  // Each answer is the loss of exactly one sample point at its query.
  for (std::size_t t = 0; t < 4; ++t) {
    bool found = false;
    for (const auto& z : s.points)
      found = found || same_answer(tr.answers[t], sample_oracle(tr.queries[t], z, p), 0.0);
    CHECK(found);
  }
}

TEST_CASE("runner requires at least one oracle call") {
  auto alg = projected_gd(2, {0.1});
  Rng rng = make_stream(8, "test.t0");
  CHECK_THROWS_AS(run_full_batch(*alg, quadratic(vec2(0, 0)), 0, rng), InvalidArgument);
}
