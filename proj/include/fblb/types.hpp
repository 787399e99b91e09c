#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fblb {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// A point of the instance domain. Coordinates are 0-based: index i < d is the
// i+1'th hinge coordinate, index d is the Nemirovski sentinel coordinate and
// index d+1 carries the linear ε-term.
using Point = Vec<double>;

using BitVector = std::vector<std::uint8_t>;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query outside the unit ball.
class DomainViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InsufficientSurvivors : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A check was asked to run outside the parameter regime where its claim holds.
class PreconditionViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDomainTolerance = 1e-9;

// Radial projection onto the closed unit ball.
template <typename Derived>
Vec<typename Derived::Scalar> project_unit_ball(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = w.norm();
  if (norm <= Scalar(1)) return w;
  return w / norm;
}

}  // namespace fblb
