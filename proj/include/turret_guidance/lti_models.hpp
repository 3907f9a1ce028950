#pragma once

#include <array>
#include <cmath>
#include <string>
#include <variant>

#include "turret_guidance/common.hpp"

namespace turret_guidance {

/**
 * Single-input single-output continuous LTI channel
 *
 *   x' = A x + B u,   y = C x + d u
 *
 * A zero-dimensional realization is a pure gain (y = d u).
 */
class LtiRealization {
 public:
  LtiRealization() : LtiRealization(Matrix(0, 0), Vector(0), RowVector(0), 1.0) {}

  LtiRealization(Matrix a, Vector b, RowVector c, double d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(d) {
    const auto n = a_.rows();
    if (a_.cols() != n || b_.size() != n || c_.size() != n) {
      throw InvalidConfig("LtiRealization: inconsistent dimensions (A " +
                          std::to_string(a_.rows()) + "x" + std::to_string(a_.cols()) +
                          ", B " + std::to_string(b_.size()) + ", C " +
                          std::to_string(c_.size()) + ")");
    }
    if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !std::isfinite(d_)) {
      throw InvalidConfig("LtiRealization: non-finite entry");
    }
  }

  static LtiRealization feedthrough(double gain) {
    return LtiRealization(Matrix(0, 0), Vector(0), RowVector(0), gain);
  }

  [[nodiscard]] int order() const { return static_cast<int>(a_.rows()); }
  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] const Vector& b() const { return b_; }
  [[nodiscard]] const RowVector& c() const { return c_; }
  [[nodiscard]] double d() const { return d_; }

  [[nodiscard]] Vector derivative(const Vector& x, double u) const { return a_ * x + b_ * u; }
  [[nodiscard]] double output(const Vector& x, double u) const {
    return (order() == 0 ? 0.0 : c_.dot(x)) + d_ * u;
  }

 private:
  Matrix a_;
  Vector b_;
  RowVector c_;
  double d_;
};

struct IdealActuator {};

struct FirstOrderLag {
  double time_constant = 1.0;
};

struct CustomActuator {
  LtiRealization realization;
};

using ActuatorPreset = std::variant<IdealActuator, FirstOrderLag, CustomActuator>;

inline LtiRealization expand_preset(const ActuatorPreset& preset) {
  struct Visitor {
    LtiRealization operator()(const IdealActuator&) const {
      return LtiRealization::feedthrough(1.0);
    }
    LtiRealization operator()(const FirstOrderLag& lag) const {
      if (!(lag.time_constant > 0.0) || !std::isfinite(lag.time_constant)) {
        throw InvalidConfig("first-order lag time constant must be positive, got " +
                            std::to_string(lag.time_constant));
      }
      Matrix a(1, 1);
      a(0, 0) = -1.0 / lag.time_constant;
      Vector b(1);
      b(0) = 1.0 / lag.time_constant;
      RowVector c(1);
      c(0) = 1.0;
      return {a, b, c, 0.0};
    }
    LtiRealization operator()(const CustomActuator& custom) const { return custom.realization; }
  };
  return std::visit(Visitor{}, preset);
}

namespace detail {

inline double one_norm(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).cwiseAbs().sum());
  return best;
}

// Pade numerator coefficients for degrees 3, 5, 7, 9 and 13.
inline constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
inline constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
inline constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                                 25200.0,    1512.0,    56.0,      1.0};
inline constexpr std::array<double, 10> kPade9 = {
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0,     110880.0,     3960.0,       90.0,        1.0};
inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norms for which each degree meets double-precision backward error.
inline constexpr std::array<double, 5> kPadeTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                     9.504178996162932e-1, 2.097847961257068e0,
                                                     5.371920351148152e0};

template <std::size_t N>
Matrix pade_low_degree(const Matrix& a, const std::array<double, N>& coef) {
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix even_pow = ident;
  Matrix u_acc = coef[1] * ident;
  Matrix v_acc = coef[0] * ident;
  for (std::size_t k = 2; k < N; k += 2) {
    even_pow = even_pow * a2;
    v_acc += coef[k] * even_pow;
    u_acc += coef[k + 1] * even_pow;
  }
  const Matrix u = a * u_acc;
  return (v_acc - u).partialPivLu().solve(v_acc + u);
}

inline Matrix pade_degree13(const Matrix& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  const Matrix u = a * (u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                   b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/**
 * Dense matrix exponential by scaling and squaring with a diagonal Pade
 * approximant. The degree is picked from the 1-norm; only the degree-13
 * branch scales. Strictly upper-triangular (nilpotent) input short-circuits to
 * the finite series, so the ideal-actuator model gets I + A t exactly.
 */
inline Matrix matrix_exponential(const Matrix& m) {
  if (m.rows() != m.cols()) throw ContractViolation("matrix_exponential: matrix is not square");
  if (!m.allFinite()) throw NumericDomainError("matrix_exponential: non-finite entry");
  const auto n = m.rows();
  if (n == 0) return Matrix(0, 0);

  const double norm = detail::one_norm(m);
  if (norm == 0.0) return Matrix::Identity(n, n);
  // Strictly upper-triangular input is nilpotent: the Taylor series terminates.
  if (m.triangularView<Eigen::Lower>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0) {
    Matrix result = Matrix::Identity(n, n);
    Matrix term = result;
    for (Eigen::Index k = 1; k < n; ++k) {
      term = (term * m / static_cast<double>(k)).eval();
      if (term.cwiseAbs().maxCoeff() == 0.0) break;
      result += term;
    }
    return result;
  }
  if (norm <= detail::kPadeTheta[0]) return detail::pade_low_degree(m, detail::kPade3);
  if (norm <= detail::kPadeTheta[1]) return detail::pade_low_degree(m, detail::kPade5);
  if (norm <= detail::kPadeTheta[2]) return detail::pade_low_degree(m, detail::kPade7);
  if (norm <= detail::kPadeTheta[3]) return detail::pade_low_degree(m, detail::kPade9);

  const int squarings =
      std::max(0, static_cast<int>(std::ceil(std::log2(norm / detail::kPadeTheta[4]))));
  Matrix result = detail::pade_degree13(m / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace turret_guidance
