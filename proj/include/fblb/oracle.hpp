#pragma once

#include <cstddef>

#include "fblb/instance.hpp"
#include "fblb/rng.hpp"
#include "fblb/sampling.hpp"

namespace fblb {

struct OracleAnswer {
  Point grad;
  double value = 0.0;
};

// Bitwise equality of gradients, values within `value_tol`.
bool same_answer(const OracleAnswer& a, const OracleAnswer& b, double value_tol = 1e-12);

// (∇F_S(w), F_S(w)). Each per-sample term is a function of (w, z_i) alone.
// Throws DomainViolation when ‖w‖ > 1 + kDomainTolerance.
OracleAnswer full_batch_oracle(const Point& w, const Sample& s);

// Per-sample access, used only by the SGD baseline.
OracleAnswer sample_oracle(const Point& w, const SamplePoint& z, const ConstructionParams& params);

struct RiskMode {
  enum class Kind { Exact, MonteCarlo };
  Kind kind = Kind::Exact;
  std::size_t samples = 0;

  static RiskMode exact() { return {}; }
  static RiskMode monte_carlo(std::size_t m) { return {Kind::MonteCarlo, m}; }
};

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  RiskMode mode;
};

// Hard cap on the number of active hinge coordinates for exact enumeration.
inline constexpr int kMaxExactActive = 25;

// Number of hinge coordinates with h(w(i)) != 0.
int active_coordinates(const Point& w, const ConstructionParams& params);

// F(w) = E_α f(w; α). Exact mode enumerates the 2^k sign patterns of the k
// active coordinates and uses E[v_α(i)] = (2n-1)/(4n) for the linear part;
// it throws PreconditionViolated when k > kMaxExactActive. Monte-Carlo mode
// samples only the k active bits and averages g over them. The Rng is only
// consumed in Monte-Carlo mode.
RiskEstimate population_risk(const Point& w, const ConstructionParams& params, RiskMode mode, Rng& rng);
RiskEstimate population_risk(const Point& w, const ConstructionParams& params);

// F(w) - F(-e_{d+2}). Since F(-e_{d+2}) >= min F this under-reports the true
// excess risk.
RiskEstimate excess_risk(const Point& w, const ConstructionParams& params, RiskMode mode, Rng& rng);
RiskEstimate excess_risk(const Point& w, const ConstructionParams& params);

// -e_{d+2}.
Point reference_point(const ConstructionParams& params);

}  // namespace fblb
