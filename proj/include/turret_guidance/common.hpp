#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace turret_guidance {

/// Upper bound on the assembled linear state dimension (4 + n_p + n_c).
inline constexpr int kMaxStates = 16;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor,
                             kMaxStates, kMaxStates>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxStates, 1>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxStates>;

// Errors. Each maps onto one failure class of the library contract.

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The closing speed is non-positive, so no terminal time exists.
class NoClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when t_go drops under the guard; callers hold the previous command.
class TerminalPhase : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BeamAttackSingularity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace turret_guidance
