#pragma once

// The hard loss family
//
//   f(w; α) = g(w; α) + γ1 v_α·w + ε w(d+2) + r(w),   w ∈ R^{d+2},
//
// with g(w; α) = sqrt(Σ_i α(i) h(w(i))²), h the one-sided hinge at -γ2, v_α the
// sample-dependent perturbation and r the (optionally biased) Nemirovski max.
// Value and subgradient rules are exact; the subgradient is the particular
// selection the span arguments rely on (largest maximizing index in r, zero
// wherever g is not differentiable).

#include <cmath>
#include <cstddef>
#include <string>

#include "fblb/types.hpp"

namespace fblb {

enum class Variant { Simple, Full };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ConstructionParams {
  int n = 1;
  int d = 1;
  int T = 1;
  double eps = 1.0;
  double gamma1 = 0.25;
  double gamma2 = 1.0;
  double gamma3 = 1.0 / 16.0;
  Variant variant = Variant::Full;

  [[nodiscard]] Eigen::Index dim() const { return static_cast<Eigen::Index>(d) + 2; }
  [[nodiscard]] Eigen::Index sentinel() const { return d; }
  [[nodiscard]] Eigen::Index linear_coord() const { return static_cast<Eigen::Index>(d) + 1; }

  // Throws InvalidArgument when a field is out of range.
  void validate() const;
};

bool operator==(const ConstructionParams& a, const ConstructionParams& b);

// γ1 = εγ2/4, γ2 = ε/(T√d), γ3 = ε/16, Full variant.
ConstructionParams canonical_params(double eps, int T, int d, int n);

struct SamplePoint {
  BitVector alpha;
};

// h(a) = 0 for a >= -γ2, a + γ2 otherwise.
template <typename Scalar>
Scalar hinge(Scalar a, Scalar gamma2) {
  return a >= -gamma2 ? Scalar(0) : a + gamma2;
}

template <typename Derived>
typename Derived::Scalar g_value(const Eigen::MatrixBase<Derived>& w, std::span<const std::uint8_t> alpha,
                                 double gamma2) {
  using Scalar = typename Derived::Scalar;
  Scalar acc(0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!alpha[i]) continue;
    const Scalar h = hinge<Scalar>(w(static_cast<Eigen::Index>(i)), Scalar(gamma2));
    acc += h * h;
  }
  return std::sqrt(acc);
}

// Zero wherever g vanishes (its only non-differentiable set).
template <typename Derived>
Vec<typename Derived::Scalar> g_subgrad(const Eigen::MatrixBase<Derived>& w, std::span<const std::uint8_t> alpha,
                                        double gamma2) {
  using Scalar = typename Derived::Scalar;
  Vec<Scalar> grad = Vec<Scalar>::Zero(w.size());
  const Scalar g = g_value(w, alpha, gamma2);
  if (g == Scalar(0)) return grad;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!alpha[i]) continue;
    const auto k = static_cast<Eigen::Index>(i);
    const Scalar h = hinge<Scalar>(w(k), Scalar(gamma2));
    if (h != Scalar(0)) grad(k) = h / g;
  }
  return grad;
}

// Offset σ of coordinate index k ∈ [0, d]: (k+1)γ1γ3/(4dn) on the hinge block,
// 2γ3 on the sentinel; identically zero for the simple variant.
inline double nemirovski_offset(Eigen::Index k, const ConstructionParams& p) {
  if (p.variant == Variant::Simple) return 0.0;
  if (k == p.sentinel()) return 2.0 * p.gamma3;
  return static_cast<double>(k + 1) * p.gamma1 * p.gamma3 / (4.0 * p.d * p.n);
}

namespace detail {

// Largest index attaining max_{k<=d} w(k)+σ_k, together with that max.
template <typename Derived>
std::pair<Eigen::Index, typename Derived::Scalar> nemirovski_argmax(const Eigen::MatrixBase<Derived>& w,
                                                                    const ConstructionParams& p) {
  using Scalar = typename Derived::Scalar;
  Eigen::Index best = 0;
  Scalar best_val = w(0) + Scalar(nemirovski_offset(0, p));
  for (Eigen::Index k = 1; k <= p.sentinel(); ++k) {
    const Scalar v = w(k) + Scalar(nemirovski_offset(k, p));
    if (v >= best_val) {
      best_val = v;
      best = k;
    }
  }
  return {best, best_val};
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar nemirovski_value(const Eigen::MatrixBase<Derived>& w, const ConstructionParams& p) {
  using Scalar = typename Derived::Scalar;
  const auto [k, m] = detail::nemirovski_argmax(w, p);
  return m > Scalar(0) ? m : Scalar(0);
}

// e_k for the largest maximizing k when the max is >= 0 (ties with the constant
// branch go to the coordinate), zero otherwise.
template <typename Derived>
Vec<typename Derived::Scalar> nemirovski_subgrad(const Eigen::MatrixBase<Derived>& w, const ConstructionParams& p) {
  using Scalar = typename Derived::Scalar;
  Vec<Scalar> grad = Vec<Scalar>::Zero(w.size());
  const auto [k, m] = detail::nemirovski_argmax(w, p);
  if (m >= Scalar(0)) grad(k) = Scalar(1);
  return grad;
}

// v_α: +1 where α(i)=1, -1/(2n) where α(i)=0, zero on the two trailing coordinates.
Point perturbation_vector(std::span<const std::uint8_t> alpha, int n);

template <typename Derived>
void check_dims(const Eigen::MatrixBase<Derived>& w, const SamplePoint& z, const ConstructionParams& p) {
  if (w.size() != p.dim())
    throw InvalidArgument("point has dimension " + std::to_string(w.size()) + ", expected " +
                          std::to_string(p.dim()));
  if (z.alpha.size() != static_cast<std::size_t>(p.d))
    throw InvalidArgument("sample point has " + std::to_string(z.alpha.size()) + " bits, expected " +
                          std::to_string(p.d));
}

template <typename Derived>
typename Derived::Scalar loss_value(const Eigen::MatrixBase<Derived>& w, const SamplePoint& z,
                                    const ConstructionParams& p) {
  using Scalar = typename Derived::Scalar;
  check_dims(w, z, p);
  Scalar linear(0);
  const Scalar off = Scalar(-1.0 / (2.0 * p.n));
  for (int i = 0; i < p.d; ++i) linear += (z.alpha[i] ? Scalar(1) : off) * w(i);
  return g_value(w, z.alpha, p.gamma2) + Scalar(p.gamma1) * linear + Scalar(p.eps) * w(p.linear_coord()) +
         nemirovski_value(w, p);
}

template <typename Derived>
Vec<typename Derived::Scalar> loss_subgrad(const Eigen::MatrixBase<Derived>& w, const SamplePoint& z,
                                           const ConstructionParams& p) {
  using Scalar = typename Derived::Scalar;
  check_dims(w, z, p);
  Vec<Scalar> grad = g_subgrad(w, z.alpha, p.gamma2);
  const Scalar off = Scalar(-1.0 / (2.0 * p.n));
  for (int i = 0; i < p.d; ++i) grad(i) += Scalar(p.gamma1) * (z.alpha[i] ? Scalar(1) : off);
  grad(p.linear_coord()) += Scalar(p.eps);
  grad += nemirovski_subgrad(w, p);
  return grad;
}

// Lipschitz constant of w ↦ f(w; z) certified by the triangle inequality.
inline double loss_lipschitz_bound(const ConstructionParams& p) {
  return 2.0 + p.eps + p.gamma1 * std::sqrt(static_cast<double>(p.d));
}

}  // namespace fblb
