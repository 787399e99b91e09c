#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fblb/oracle.hpp"
#include "fblb/rng.hpp"
#include "fblb/sampling.hpp"

namespace fblb {

struct Exchange {
  Point query;
  OracleAnswer answer;
};

enum class Averaging { Last, Uniform };

std::string to_string(Averaging a);
Averaging averaging_from_string(const std::string& s);

struct StepSchedule {
  enum class Decay { Constant, InvSqrt };
  double eta = 0.1;
  Decay decay = Decay::Constant;

  // Step used for the update producing w_t, t >= 1.
  [[nodiscard]] double at(std::size_t t) const;
};

// A full-batch method: every query is a fixed (possibly randomized) function of
// the previous queries and oracle answers. Implementations never see the
// sample; the runner is the only thing holding an oracle.
class FullBatchAlgorithm {
 public:
  FullBatchAlgorithm(Eigen::Index dim, Averaging averaging) : dim_(dim), averaging_(averaging) {}
  virtual ~FullBatchAlgorithm() = default;

  [[nodiscard]] virtual std::string name() const = 0;

  // w_t given the t exchanges so far.
  virtual Point next_query(std::span<const Exchange> history, Rng& rng) = 0;

  // Output from the post-update iterates w_1..w_T.
  [[nodiscard]] virtual Point output(std::span<const Point> iterates) const;

  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] Averaging averaging() const { return averaging_; }

 protected:
  Eigen::Index dim_;
  Averaging averaging_;
};

using AlgorithmFactory = std::function<std::unique_ptr<FullBatchAlgorithm>()>;

// w_0 = 0, w_t = Π(w_{t-1} - η_t ∇F_S(w_{t-1})).
std::unique_ptr<FullBatchAlgorithm> projected_gd(Eigen::Index dim, StepSchedule eta,
                                                 Averaging averaging = Averaging::Uniform);

// Regularized objective λ‖w‖² + F_S.
//  Proximal:  w_{t+1} = Π[(w_t - η ∇F_S(w_t)) / (1 + 2ηλ)]
//  AsWritten: w_{t+1} = Π[(1-η)(2λ w_t) - η ∇F_S(w_t)]
enum class RegularizedForm { Proximal, AsWritten };
std::unique_ptr<FullBatchAlgorithm> regularized_gd(Eigen::Index dim, double lambda, StepSchedule eta,
                                                   RegularizedForm form = RegularizedForm::Proximal,
                                                   Averaging averaging = Averaging::Uniform);

// Gaussian perturbation of each update, drawn from the runner's stream, with
// per-coordinate scale noise_std/√dim so its expected squared norm is noise_std².
std::unique_ptr<FullBatchAlgorithm> noisy_gd(Eigen::Index dim, StepSchedule eta, double noise_std,
                                             Averaging averaging = Averaging::Uniform);

// w_{t+1} = Π(w_t - η ∇F_S(w_t) + μ(w_t - w_{t-1})).
std::unique_ptr<FullBatchAlgorithm> heavy_ball(Eigen::Index dim, StepSchedule eta, double momentum,
                                               Averaging averaging = Averaging::Uniform);

// Always queries `query`, always outputs `output`.
std::unique_ptr<FullBatchAlgorithm> constant_algorithm(Point query, Point output);

struct Trajectory {
  std::vector<Point> queries;
  std::vector<OracleAnswer> answers;
  std::vector<Point> iterates;  // w_1..w_T
  Point output;
  std::size_t oracle_calls = 0;
  std::size_t domain_violations = 0;
};

using OracleFn = std::function<OracleAnswer(const Point&)>;

// Drives T query/answer rounds. Queries outside the unit ball are counted and
// projected before reaching the oracle.
Trajectory run_full_batch(FullBatchAlgorithm& alg, const OracleFn& oracle, std::size_t T, Rng& rng);

// One pass of projected SGD over a random order of S (T = n steps), output
// per `averaging` over w_1..w_n.
Trajectory sgd(StepSchedule eta, const Sample& s, Rng& rng, Averaging averaging = Averaging::Uniform);

}  // namespace fblb
