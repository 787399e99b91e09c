#include "fblb/instance.hpp"

#include <cmath>

namespace fblb {

std::string to_string(Variant v) { return v == Variant::Simple ? "simple" : "full"; }

Variant variant_from_string(const std::string& s) {
  if (s == "simple" || s == "Simple") return Variant::Simple;
  if (s == "full" || s == "Full") return Variant::Full;
  throw InvalidArgument("unknown variant '" + s + "'");
}

void ConstructionParams::validate() const {
  if (n < 1 || d < 1 || T < 1) throw InvalidArgument("n, d and T must be positive");
  const bool finite = std::isfinite(eps) && std::isfinite(gamma1) && std::isfinite(gamma2) && std::isfinite(gamma3);
  if (!finite || !(eps > 0) || !(gamma1 > 0) || !(gamma2 > 0) || !(gamma3 > 0))
    throw InvalidArgument("eps, gamma1, gamma2 and gamma3 must be finite and strictly positive");
}

bool operator==(const ConstructionParams& a, const ConstructionParams& b) {
  return a.n == b.n && a.d == b.d && a.T == b.T && a.eps == b.eps && a.gamma1 == b.gamma1 &&
         a.gamma2 == b.gamma2 && a.gamma3 == b.gamma3 && a.variant == b.variant;
}

ConstructionParams canonical_params(double eps, int T, int d, int n) {
  if (!(eps > 0) || !std::isfinite(eps)) throw InvalidArgument("eps must be positive");
  if (T < 1 || d < 1 || n < 1) throw InvalidArgument("T, d and n must be at least 1");
  ConstructionParams p;
  p.n = n;
  p.d = d;
  p.T = T;
  p.eps = eps;
  p.gamma2 = eps / (T * std::sqrt(static_cast<double>(d)));
  p.gamma1 = eps * p.gamma2 / 4.0;
  p.gamma3 = eps / 16.0;
  p.variant = Variant::Full;
  return p;
}

Point perturbation_vector(std::span<const std::uint8_t> alpha, int n) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  const auto d = static_cast<Eigen::Index>(alpha.size());
  Point v = Point::Zero(d + 2);
  const double off = -1.0 / (2.0 * n);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = alpha[static_cast<std::size_t>(i)] ? 1.0 : off;
  return v;
}

}  // namespace fblb
