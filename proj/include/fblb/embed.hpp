#pragma once

#include <cstddef>
#include <vector>

#include "fblb/optim.hpp"
#include "fblb/spanlab.hpp"

namespace fblb {

// Column-orthonormal U ∈ R^{d2 × dim}; the embedded loss is f(Uᵀw; z).
struct OrthoEmbedding {
  Mat<double> U;

  [[nodiscard]] Eigen::Index d2() const { return U.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return U.cols(); }
};

inline constexpr double kMaxEmbeddingEntries = 1e8;

// Haar-distributed: Householder QR of a Gaussian matrix with the column signs
// fixed by the diagonal of R.
OrthoEmbedding sample_orthogonal(Eigen::Index dim, Eigen::Index d2, Rng& rng);

// (U ∇F_S(Uᵀw), F_S(Uᵀw)).
OracleAnswer embedded_oracle(const Point& w, const OrthoEmbedding& e, const Sample& s);

// ‖(I - Π) Uᵀ w‖∞ with Π the projection onto span(basis).
double leakage(const Point& w, const OrthoEmbedding& e, const SpanBasis& basis);

// Tail bound for leakage exceeding c as printed with the lemma:
// 2 d2 exp(-dim c² (d2 - k + 1) / 2).
double leakage_bound_stated(Eigen::Index dim, Eigen::Index k, Eigen::Index d2, double c);

// The bound the lemma's argument establishes: 2 d2 exp(-c² (d2 - k + 1) / (2 dim)).
double leakage_bound_derived(Eigen::Index dim, Eigen::Index k, Eigen::Index d2, double c);

struct ArbitrationResult {
  std::size_t steps = 0;
  // Steps of the projecting run where the true embedded answer differs from
  // the arbitrated one at the same query.
  std::size_t divergences = 0;
  // First step where the free and the projecting runs received different
  // answers (== steps when they never did).
  std::size_t first_split = 0;
  double max_leakage = 0.0;
  Trajectory free_run;
  Trajectory projected_run;
};

// Runs a fresh algorithm from `make` twice with identical randomness: once
// against the embedded oracle, once against the arbitrator that answers at
// Π_{2i}(Uᵀ w_i) (span over the 2i largest survivors). Requires |I(S)| > 2T.
ArbitrationResult arbitration_divergence(const AlgorithmFactory& make, const OrthoEmbedding& e, const Sample& s,
                                         std::size_t T, std::uint64_t algorithm_seed);

}  // namespace fblb
