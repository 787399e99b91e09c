#pragma once

#include <cstddef>
#include <vector>

#include "fblb/instance.hpp"
#include "fblb/rng.hpp"

namespace fblb {

struct Sample {
  ConstructionParams params;
  std::vector<SamplePoint> points;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

// Sorted 0-based coordinate indices; the sentinel index d is always present.
struct SurvivorSet {
  std::vector<Eigen::Index> indices;

  [[nodiscard]] std::size_t size() const { return indices.size(); }
  [[nodiscard]] bool contains(Eigen::Index k) const;
  bool operator==(const SurvivorSet&) const = default;
};

// n i.i.d. rows, each bit Bernoulli(1/2).
Sample draw_sample(const ConstructionParams& params, Rng& rng);

SurvivorSet survivor_set(const Sample& s);

// The k largest members. Throws InsufficientSurvivors when k exceeds |I|.
SurvivorSet top_survivors(const SurvivorSet& survivors, std::size_t k);

// v̄ = (1/n) Σ v_α.
Point mean_perturbation(const Sample& s);

struct ProbeResult {
  double probability = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t hits = 0;
};

// Fraction of fresh samples with |I(S)| > 2T.
ProbeResult concentration_probe(int n, int d, int T, std::size_t trials, Rng& rng);

// Pr(Bin(trials, p) >= k).
double binomial_upper_tail(int trials, double p, int k);

}  // namespace fblb
