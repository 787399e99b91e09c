#include <doctest.h>

#include "fblb/embed.hpp"
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

TEST_CASE("sampled embeddings have orthonormal columns") {
  Rng rng = make_stream(1, "test.ortho");
  for (auto [dim, d2] : {std::pair{1, 1}, {3, 3}, {10, 256}, {66, 200}}) {
    const OrthoEmbedding e = sample_orthogonal(dim, d2, rng);
    CHECK(e.d2() == d2);
    CHECK(e.dim() == dim);
    CHECK((e.U.transpose() * e.U - Mat<double>::Identity(dim, dim)).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  CHECK_THROWS_AS(sample_orthogonal(5, 4, rng), InvalidArgument);
  CHECK_THROWS_AS(sample_orthogonal(20000, 20000, rng), InvalidArgument);
}

TEST_CASE("embedding entries have Haar moments") {
  // Each entry of a Haar column is symmetric with E[U_ij²] = 1/d2; without the
  // sign correction the diagonal entries are biased.
  Rng rng = make_stream(2, "test.haar");
  const int d2 = 8, dim = 3, reps = 20000;
  double mean00 = 0, sq00 = 0, mean11 = 0;
  for (int r = 0; r < reps; ++r) {
    const OrthoEmbedding e = sample_orthogonal(dim, d2, rng);
    mean00 += e.U(0, 0);
    sq00 += e.U(0, 0) * e.U(0, 0);
    mean11 += e.U(1, 1);
  }
  const double se = std::sqrt(1.0 / d2 / reps);
  CHECK(std::abs(mean00 / reps) < 4 * se);
  CHECK(std::abs(mean11 / reps) < 4 * se);
  CHECK(sq00 / reps == doctest::Approx(1.0 / d2).epsilon(0.05));
}

TEST_CASE("embedded oracle is the pulled-back full-batch oracle") {
  Rng rng = make_stream(3, "test.compose");
  const auto p = canonical_params(0.25, 4, 30, 2);
  const Sample s = draw_sample(p, rng);
  const OrthoEmbedding e = sample_orthogonal(p.dim(), 80, rng);
  for (int t = 0; t < 20; ++t) {
    const Point w = gen::in_ball(rng, 80);
    const OracleAnswer a = embedded_oracle(w, e, s);
    const OracleAnswer b = full_batch_oracle(Point(e.U.transpose() * w), s);
    CHECK((a.grad - e.U * b.grad).lpNorm<Eigen::Infinity>() < 1e-15);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
  }
  Point far = Point::Zero(80);
  far(0) = 2;
  CHECK_THROWS_AS(embedded_oracle(far, e, s), DomainViolation);
  CHECK_THROWS_AS(embedded_oracle(Point::Zero(79), e, s), InvalidArgument);
}

TEST_CASE("leakage vanishes on the full space and inside the span") {
  Rng rng = make_stream(4, "test.leak");
  const int dim = 10;
  const OrthoEmbedding e = sample_orthogonal(dim, 64, rng);
  std::vector<Point> all;
  for (int i = 0; i < dim; ++i) all.push_back(Point::Unit(dim, i));
  const SpanBasis full = SpanBasis::from_generators(all, dim);
  std::vector<Point> some{Point::Random(dim), Point::Random(dim)};
  const SpanBasis part = SpanBasis::from_generators(some, dim);
  for (int t = 0; t < 20; ++t) {
    const Point w = gen::in_ball(rng, 64);
    CHECK(leakage(w, e, full) < 1e-14);
    const Point inside = e.U * project(Point(e.U.transpose() * w), part);
    CHECK(leakage(inside, e, part) < 1e-14);
  }
  const Point w = gen::in_ball(rng, 64);
  const SpanBasis none = SpanBasis::from_generators({}, dim);
  CHECK(leakage(w, e, none) == doctest::Approx((e.U.transpose() * w).lpNorm<Eigen::Infinity>()));
}

TEST_CASE("leakage bound formulas") {
  CHECK(leakage_bound_stated(10, 4, 256, 0.1) == doctest::Approx(512 * std::exp(-10 * 0.01 * 253 / 2)));
  CHECK(leakage_bound_derived(10, 4, 256, 0.1) == doctest::Approx(512 * std::exp(-0.01 * 253 / 20)));
}

TEST_CASE("span-restricted GD never diverges under arbitration") {
  Rng rng = make_stream(5, "test.arb");
  const auto p = canonical_params(0.25, 4, 128, 2);
  for (int t = 0; t < 5; ++t) {
    const Sample s = sample_with_survivors(p, 8, rng);
    for (int d2 : {130, 400}) {
      const OrthoEmbedding e = sample_orthogonal(p.dim(), d2, rng);
      const ArbitrationResult r =
          arbitration_divergence([&] { return projected_gd(d2, {0.5}); }, e, s, 4, 11);
      CHECK(r.steps == 4);
      CHECK(r.divergences == 0);
      CHECK(r.first_split == 4);
      CHECK(r.max_leakage < 1e-12);
      CHECK(r.free_run.output == r.projected_run.output);
    }
  }
}

TEST_CASE("an algorithm querying off the span is caught") {
  Rng rng = make_stream(6, "test.adv");
  const auto p = canonical_params(0.25, 4, 128, 2);
  const Sample s = sample_with_survivors(p, 8, rng);
  const OrthoEmbedding e = sample_orthogonal(p.dim(), p.dim(), rng);
  const Point query = e.U * (0.5 * reference_point(p));
  const ArbitrationResult r =
      arbitration_divergence([&] { return constant_algorithm(query, query); }, e, s, 4, 3);
  CHECK(r.divergences > 0);
  CHECK(r.first_split == 0);
  CHECK(r.max_leakage > 0.1);
}

TEST_CASE("arbitration requires more than 2T survivors") {
  Rng rng = make_stream(7, "test.arbpre");
  const auto p = canonical_params(0.25, 4, 4, 2);
  Sample s = draw_sample(p, rng);
  const OrthoEmbedding e = sample_orthogonal(p.dim(), p.dim(), rng);
  CHECK_THROWS_AS(arbitration_divergence([&] { return projected_gd(p.dim(), {0.5}); }, e, s, 4, 1),
                  PreconditionViolated);
}
