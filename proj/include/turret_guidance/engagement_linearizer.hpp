#pragma once

#include <cmath>
#include <string>

#include "turret_guidance/common.hpp"
#include "turret_guidance/lti_models.hpp"

namespace turret_guidance {

struct LosPolar {
  double range = 0.0;
  double angle = 0.0;
};

/// Range and bearing of the target seen from the pursuer. Coincident
/// positions give (0, 0).
inline LosPolar los_polar(Point2 pursuer, Point2 target) {
  const double dx = target.x - pursuer.x;
  const double dy = target.y - pursuer.y;
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return {0.0, 0.0};
  return {r, wrap_angle(std::atan2(dy, dx))};
}

/// Rate at which the line of sight shortens. Not clamped; non-positive means
/// the pair is opening.
inline double closing_speed(double v_p, double theta_p, double v_t, double theta_t,
                            double gamma) {
  return v_p * std::cos(theta_p - gamma) - v_t * std::cos(theta_t - gamma);
}

inline double terminal_time(double r0, double v_c) {
  if (!(v_c > 0.0)) {
    throw NoClosureError("closing speed " + std::to_string(v_c) +
                         " m/s is not positive; no terminal time");
  }
  return r0 / v_c;
}

/// Collision-triangle reference frozen at one instant.
struct CollisionTriangle {
  double gamma0 = 0.0;
  double r0 = 0.0;
  double theta_p0 = 0.0;
  double theta_t0 = 0.0;
  double v_c = 0.0;
  double t_f = 0.0;  ///< absolute terminal time
  double lead_p = 0.0;
  double lead_t = 0.0;
};

/// Freezes the geometry at time t_now. Throws NoClosureError if v_c <= 0.
inline CollisionTriangle freeze_triangle(double t_now, Point2 pursuer, double theta_p, double v_p,
                                         Point2 target, double theta_t, double v_t) {
  const auto los = los_polar(pursuer, target);
  CollisionTriangle tri;
  tri.gamma0 = los.angle;
  tri.r0 = los.range;
  tri.theta_p0 = wrap_angle(theta_p);
  tri.theta_t0 = wrap_angle(theta_t);
  tri.lead_p = wrap_angle(theta_p - los.angle);
  tri.lead_t = wrap_angle(theta_t - los.angle);
  tri.v_c = closing_speed(v_p, theta_p, v_t, theta_t, los.angle);
  tri.t_f = t_now + terminal_time(los.range, tri.v_c);
  return tri;
}

/**
 * Linearized engagement about a collision triangle. State order is
 * [d_perp, d_perp_dot, psi, omega, x_P..., x_C...].
 */
struct LinearizedModel {
  CollisionTriangle triangle;
  Matrix a_matrix;
  Matrix b1_matrix;
  Vector b2_vector;
  LtiRealization pursuer_dyn;
  LtiRealization turret_dyn;
  double v_p = 0.0;

  [[nodiscard]] int n_p() const { return pursuer_dyn.order(); }
  [[nodiscard]] int n_c() const { return turret_dyn.order(); }
  [[nodiscard]] int state_dim() const { return 4 + n_p() + n_c(); }
  [[nodiscard]] int pursuer_offset() const { return 4; }
  [[nodiscard]] int turret_offset() const { return 4 + n_p(); }
  [[nodiscard]] double d_p() const { return pursuer_dyn.d(); }
  [[nodiscard]] double d_c() const { return turret_dyn.d(); }
};

inline LinearizedModel assemble_linear_model(const CollisionTriangle& triangle,
                                             const LtiRealization& pursuer_dyn,
                                             const LtiRealization& turret_dyn, double v_p) {
  if (!(v_p > 0.0)) throw ContractViolation("assemble_linear_model: v_p must be positive");
  const int np = pursuer_dyn.order();
  const int nc = turret_dyn.order();
  const int n = 4 + np + nc;
  if (n > kMaxStates) {
    throw InvalidConfig("actuator orders too large: state dimension " + std::to_string(n) +
                        " exceeds " + std::to_string(kMaxStates));
  }
  const int op = 4;
  const int oc = 4 + np;
  const double cos_p = std::cos(triangle.lead_p);

  LinearizedModel m{triangle, Matrix::Zero(n, n), Matrix::Zero(n, 2), Vector::Zero(n),
                    pursuer_dyn, turret_dyn, v_p};
  auto& a = m.a_matrix;
  a(0, 1) = 1.0;
  a(2, 3) = 1.0;
  if (np > 0) {
    a.block(1, op, 1, np) = -cos_p * pursuer_dyn.c();
    a.block(2, op, 1, np) = pursuer_dyn.c() / v_p;
    a.block(op, op, np, np) = pursuer_dyn.a();
    m.b1_matrix.block(op, 0, np, 1) = pursuer_dyn.b();
  }
  if (nc > 0) {
    a.block(3, oc, 1, nc) = turret_dyn.c();
    a.block(oc, oc, nc, nc) = turret_dyn.a();
    m.b1_matrix.block(oc, 1, nc, 1) = turret_dyn.b();
  }
  m.b1_matrix(1, 0) = -cos_p * pursuer_dyn.d();
  m.b1_matrix(2, 0) = pursuer_dyn.d() / v_p;
  m.b1_matrix(3, 1) = turret_dyn.d();
  m.b2_vector(1) = std::cos(triangle.lead_t);
  return m;
}

}  // namespace turret_guidance
