#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fblb {

// One reproducible random stream. Streams are keyed by (seed, name, index) so
// every module and every trial draws from its own independent sequence no
// matter how work is scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : engine_(key) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }
  bool bit() { return (engine_() >> 63) != 0; }
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t stream_key(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  return Rng(stream_key(seed, name, index));
}

}  // namespace fblb
