#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fblb/oracle.hpp"
#include "fblb/sampling.hpp"

namespace fblb {

// span{γ1 v̄ + ε e_{d+2} + e_i : i ∈ index_set} with an orthonormal basis of it.
struct SpanBasis {
  std::vector<Point> generators;
  Mat<double> ortho;  // dim × rank, orthonormal columns
  SurvivorSet index_set;

  [[nodiscard]] Eigen::Index dim() const { return ortho.rows(); }
  [[nodiscard]] Eigen::Index rank() const { return ortho.cols(); }

  // Modified Gram-Schmidt with one re-orthogonalization pass; generators whose
  // remainder falls below 1e-12 are treated as dependent.
  static SpanBasis from_generators(std::vector<Point> generators, Eigen::Index dim);
};

// Generators γ1 v̄ + ε e_{d+2} + e_i over the k largest survivors of S.
SpanBasis build_basis(const Sample& s, std::size_t k);
SpanBasis build_basis(const Point& vbar, const ConstructionParams& params, const SurvivorSet& index_set);

template <typename Derived>
Point project(const Eigen::MatrixBase<Derived>& w, const SpanBasis& basis) {
  if (basis.rank() == 0) return Point::Zero(w.size());
  return basis.ortho * (basis.ortho.transpose() * w);
}

template <typename Derived>
double span_residual(const Eigen::MatrixBase<Derived>& w, const SpanBasis& basis) {
  return (w - project(w, basis)).norm();
}

// Result of matching grad against γ1 v̄ + ε e_{d+2} + e_i.
struct GradientForm {
  Eigen::Index index = -1;  // the i, or -1 when the remainder is not a basis vector
  double residual = 0.0;    // ‖grad - γ1 v̄ - ε e_{d+2} - e_index‖∞
};

GradientForm match_gradient_form(const Point& grad, const Point& vbar, const ConstructionParams& params,
                                 double tol = 1e-9);

// min{1 - 2ε²√T, 0} - ε/2.
double error_lemma_bound(int T, double eps);

// Reason the error-lemma regime γ1 <= 2nεγ2, γ2 <= ε/√(4k) fails, if it does.
std::optional<std::string> error_lemma_precondition(const ConstructionParams& params, std::size_t k);

// ½ sqrt(Σ_{i∈[d]} h²(w(i))) + ε w(d+2).
double surrogate_value(const Point& w, const ConstructionParams& params);

struct SurrogateBudget {
  int restarts = 32;
  int steps = 2000;
};

struct SurrogateMinimum {
  Point w;
  double value = 0.0;
};

// Projected subgradient descent on the surrogate over span ∩ unit ball, step
// 1/√s, best iterate over all restarts (the first restart starts at 0).
// Throws PreconditionViolated outside the error-lemma regime.
SurrogateMinimum minimize_surrogate_over_span(const SpanBasis& basis, const ConstructionParams& params,
                                              const SurrogateBudget& budget, Rng& rng);

// ∞-norm radius of perturbations the oracle must be blind to:
// (1/(4√d)) min{γ2/3, γ1γ3/(16dn)}.
double resilience_radius(const ConstructionParams& params);

struct ResilienceResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_value_gap = 0.0;
};

// For random q with ‖q‖∞ <= resilience_radius, compares the oracle at w_t + q
// with the oracle at its projection onto the span over the t+1 largest
// survivors. w_t must lie in the span over the t largest survivors.
ResilienceResult resilience_check(const Point& w_t, const Sample& s, std::size_t t, std::size_t trials, Rng& rng);

}  // namespace fblb
