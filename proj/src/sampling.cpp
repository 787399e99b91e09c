#include "fblb/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace fblb {
namespace {

void fill_bits(BitVector& bits, Rng& rng) {
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (i % 64 == 0) word = rng.next();
    bits[i] = static_cast<std::uint8_t>(word & 1U);
    word >>= 1;
  }
}

}  // namespace

bool SurvivorSet::contains(Eigen::Index k) const { return std::binary_search(indices.begin(), indices.end(), k); }

Sample draw_sample(const ConstructionParams& params, Rng& rng) {
  params.validate();
  Sample s{params, {}};
  s.points.resize(static_cast<std::size_t>(params.n));
  for (auto& z : s.points) {
    z.alpha.assign(static_cast<std::size_t>(params.d), 0);
    fill_bits(z.alpha, rng);
  }
  return s;
}

SurvivorSet survivor_set(const Sample& s) {
  SurvivorSet out;
  const int d = s.params.d;
  for (int i = 0; i < d; ++i) {
    const bool never_set = std::none_of(s.points.begin(), s.points.end(),
                                        [i](const SamplePoint& z) { return z.alpha[static_cast<std::size_t>(i)] != 0; });
    if (never_set) out.indices.push_back(i);
  }
  out.indices.push_back(d);
  return out;
}

SurvivorSet top_survivors(const SurvivorSet& survivors, std::size_t k) {
  if (k > survivors.size())
    throw InsufficientSurvivors("requested " + std::to_string(k) + " survivors, only " +
                                std::to_string(survivors.size()) + " available");
  SurvivorSet out;
  out.indices.assign(survivors.indices.end() - static_cast<std::ptrdiff_t>(k), survivors.indices.end());
  return out;
}

Point mean_perturbation(const Sample& s) {
  const auto& p = s.params;
  Point v = Point::Zero(p.dim());
  for (const auto& z : s.points) v += perturbation_vector(z.alpha, p.n);
  return v / static_cast<double>(s.size());
}

ProbeResult concentration_probe(int n, int d, int T, std::size_t trials, Rng& rng) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (n < 1 || d < 1 || T < 0) throw InvalidArgument("need n >= 1, d >= 1, T >= 0");
  ProbeResult r;
  r.trials = trials;
  BitVector alive(static_cast<std::size_t>(d));
  BitVector row(static_cast<std::size_t>(d));
  for (std::size_t t = 0; t < trials; ++t) {
    std::fill(alive.begin(), alive.end(), std::uint8_t{1});
    for (int j = 0; j < n; ++j) {
      fill_bits(row, rng);
      for (std::size_t i = 0; i < row.size(); ++i) alive[i] &= static_cast<std::uint8_t>(row[i] ^ 1U);
    }
    const auto count = 1 + std::count(alive.begin(), alive.end(), std::uint8_t{1});
    if (count > 2L * T) ++r.hits;
  }
  r.probability = static_cast<double>(r.hits) / static_cast<double>(trials);
  r.std_error = std::sqrt(r.probability * (1.0 - r.probability) / static_cast<double>(trials));
  return r;
}

double binomial_upper_tail(int trials, double p, int k) {
  if (k <= 0) return 1.0;
  if (k > trials) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double tail = 0.0;
  for (int j = k; j <= trials; ++j) {
    const double log_pmf = std::lgamma(trials + 1.0) - std::lgamma(j + 1.0) - std::lgamma(trials - j + 1.0) +
                           j * std::log(p) + (trials - j) * std::log1p(-p);
    tail += std::exp(log_pmf);
  }
  return std::min(tail, 1.0);
}

}  // namespace fblb
