#include "fblb/oracle.hpp"

#include <cmath>
#include <vector>

namespace fblb {
namespace {

void check_domain(const Point& w) {
  const double norm = w.norm();
  if (!(norm <= 1.0 + kDomainTolerance))
    throw DomainViolation("query norm " + std::to_string(norm) + " outside the unit ball");
}

// E_α sqrt(Σ_{j active} α(j) h_j²) over uniform α, by meet-in-the-middle subset sums.
double expected_g(const std::vector<double>& h2) {
  const std::size_t k = h2.size();
  if (k == 0) return 0.0;
  const std::size_t lo_bits = k / 2;
  const std::size_t hi_bits = k - lo_bits;
  auto subset_sums = [&](std::size_t offset, std::size_t bits) {
    std::vector<double> sums(std::size_t{1} << bits, 0.0);
    for (std::size_t m = 1; m < sums.size(); ++m) {
      const auto low = static_cast<std::size_t>(__builtin_ctzll(m));
      sums[m] = sums[m & (m - 1)] + h2[offset + low];
    }
    return sums;
  };
  const auto lo = subset_sums(0, lo_bits);
  const auto hi = subset_sums(lo_bits, hi_bits);
  double total = 0.0;
  for (double b : hi) {
    double partial = 0.0;
    for (double a : lo) partial += std::sqrt(a + b);
    total += partial;
  }
  return std::ldexp(total, -static_cast<int>(k));
}

}  // namespace

bool same_answer(const OracleAnswer& a, const OracleAnswer& b, double value_tol) {
  if (a.grad.size() != b.grad.size()) return false;
  for (Eigen::Index i = 0; i < a.grad.size(); ++i)
    if (a.grad(i) != b.grad(i)) return false;
  return std::abs(a.value - b.value) <= value_tol;
}

OracleAnswer full_batch_oracle(const Point& w, const Sample& s) {
  check_domain(w);
  const auto& p = s.params;
  if (w.size() != p.dim()) throw InvalidArgument("query has the wrong dimension");
  OracleAnswer out{Point::Zero(p.dim()), 0.0};
  for (const auto& z : s.points) {
    out.grad += loss_subgrad(w, z, p);
    out.value += loss_value(w, z, p);
  }
  const double inv_n = 1.0 / static_cast<double>(s.size());
  out.grad *= inv_n;
  out.value *= inv_n;
  return out;
}

OracleAnswer sample_oracle(const Point& w, const SamplePoint& z, const ConstructionParams& params) {
  check_domain(w);
  return {loss_subgrad(w, z, params), loss_value(w, z, params)};
}

int active_coordinates(const Point& w, const ConstructionParams& params) {
  int k = 0;
  for (int i = 0; i < params.d; ++i)
    if (hinge(w(i), params.gamma2) != 0.0) ++k;
  return k;
}

RiskEstimate population_risk(const Point& w, const ConstructionParams& params, RiskMode mode, Rng& rng) {
  if (w.size() != params.dim()) throw InvalidArgument("point has the wrong dimension");
  RiskEstimate out;
  out.mode = mode;
  std::vector<double> h2;
  for (int i = 0; i < params.d; ++i) {
    const double h = hinge(w(i), params.gamma2);
    if (h != 0.0) h2.push_back(h * h);
  }
  const double mean_v = (2.0 * params.n - 1.0) / (4.0 * params.n);
  const double rest = params.gamma1 * mean_v * w.head(params.d).sum() + params.eps * w(params.linear_coord()) +
                      nemirovski_value(w, params);
  if (mode.kind == RiskMode::Kind::Exact) {
    if (h2.size() > static_cast<std::size_t>(kMaxExactActive))
      throw PreconditionViolated("exact population risk needs at most " + std::to_string(kMaxExactActive) +
                                 " active coordinates, got " + std::to_string(h2.size()));
    out.mean = expected_g(h2) + rest;
    out.std_error = 0.0;
    return out;
  }
  if (mode.samples < 2) throw InvalidArgument("Monte-Carlo mode needs at least two draws");
  // Only the bits on active coordinates are drawn; the other terms enter through
  // their exact expectations.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < mode.samples; ++j) {
    std::uint64_t word = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < h2.size(); ++i) {
      if (i % 64 == 0) word = rng.next();
      if (word & 1U) acc += h2[i];
      word >>= 1;
    }
    const double f = std::sqrt(acc);
    const double delta = f - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (f - mean);
  }
  const double var = m2 / static_cast<double>(mode.samples - 1);
  out.mean = mean + rest;
  out.std_error = std::sqrt(var / static_cast<double>(mode.samples));
  return out;
}

RiskEstimate population_risk(const Point& w, const ConstructionParams& params) {
  Rng unused(0);
  return population_risk(w, params, RiskMode::exact(), unused);
}

Point reference_point(const ConstructionParams& params) {
  Point w = Point::Zero(params.dim());
  w(params.linear_coord()) = -1.0;
  return w;
}

RiskEstimate excess_risk(const Point& w, const ConstructionParams& params, RiskMode mode, Rng& rng) {
  RiskEstimate r = population_risk(w, params, mode, rng);
  r.mean -= population_risk(reference_point(params), params).mean;
  return r;
}

RiskEstimate excess_risk(const Point& w, const ConstructionParams& params) {
  Rng unused(0);
  return excess_risk(w, params, RiskMode::exact(), unused);
}

}  // namespace fblb
