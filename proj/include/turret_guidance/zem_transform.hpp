#pragma once

#include <cmath>

#include "turret_guidance/common.hpp"
#include "turret_guidance/engagement_linearizer.hpp"
#include "turret_guidance/lti_models.hpp"

namespace turret_guidance {

/// Zero-effort terminal miss and pointing error, predicted t_go ahead.
struct TransformedState {
  double z_d = 0.0;
  double z_psi = 0.0;
  double t_go = 0.0;
};

/// Slices of the transition matrix exp(A t_go) that feed the terminal projection.
struct PhiBlocks {
  RowVector phi15;  ///< row d_perp, pursuer actuator columns
  RowVector phi25;
  RowVector phi35;  ///< row psi, pursuer actuator columns
  RowVector phi36;  ///< row psi, turret actuator columns
  Matrix full_phi;
};

inline PhiBlocks phi_blocks(const LinearizedModel& model, double t_go) {
  if (!(t_go >= 0.0)) throw ContractViolation("phi_blocks: t_go must be non-negative");
  PhiBlocks blocks;
  blocks.full_phi = matrix_exponential(model.a_matrix * t_go);
  const int np = model.n_p();
  const int nc = model.n_c();
  blocks.phi15 = blocks.full_phi.block(0, model.pursuer_offset(), 1, np);
  blocks.phi25 = blocks.full_phi.block(1, model.pursuer_offset(), 1, np);
  blocks.phi35 = blocks.full_phi.block(2, model.pursuer_offset(), 1, np);
  blocks.phi36 = blocks.full_phi.block(2, model.turret_offset(), 1, nc);
  return blocks;
}

namespace detail {

inline double dot_or_zero(const RowVector& row, const Vector& x) {
  return row.size() == 0 ? 0.0 : row.dot(x);
}

}  // namespace detail

/// Terminal projection of a linear-model state. a_t is the target's lateral
/// acceleration, held constant to t_f.
inline TransformedState exact_transform(const Vector& x, const LinearizedModel& model,
                                        const PhiBlocks& blocks, double t_go, double a_t) {
  if (x.size() != model.state_dim()) {
    throw ContractViolation("exact_transform: state has dimension " + std::to_string(x.size()) +
                            ", model expects " + std::to_string(model.state_dim()));
  }
  const Vector x_p = x.segment(model.pursuer_offset(), model.n_p());
  const Vector x_c = x.segment(model.turret_offset(), model.n_c());
  TransformedState z;
  z.t_go = t_go;
  z.z_d = x(0) + x(1) * t_go + detail::dot_or_zero(blocks.phi15, x_p) +
          0.5 * a_t * std::cos(model.triangle.lead_t) * t_go * t_go;
  z.z_psi = model.triangle.gamma0 - x(2) - x(3) * t_go - detail::dot_or_zero(blocks.phi35, x_p) -
            detail::dot_or_zero(blocks.phi36, x_c);
  return z;
}

inline TransformedState exact_transform(const Vector& x, const LinearizedModel& model,
                                        double t_go, double a_t) {
  return exact_transform(x, model, phi_blocks(model, t_go), t_go, a_t);
}

/// Input map of the transformed dynamics, z' = B_z(t) u.
inline Eigen::Matrix2d bz_matrix(const LinearizedModel& model, double t_go,
                                 const PhiBlocks& blocks) {
  if (!(t_go >= 0.0)) throw ContractViolation("bz_matrix: t_go must be non-negative");
  const double d_p = model.d_p();
  const double d_c = model.d_c();
  const double phi15_bp = detail::dot_or_zero(blocks.phi15, model.pursuer_dyn.b());
  const double phi35_bp = detail::dot_or_zero(blocks.phi35, model.pursuer_dyn.b());
  const double phi36_bc = detail::dot_or_zero(blocks.phi36, model.turret_dyn.b());
  Eigen::Matrix2d bz;
  bz(0, 0) = -d_p * t_go * std::cos(model.triangle.lead_p) + phi15_bp;
  bz(0, 1) = 0.0;
  bz(1, 0) = -phi35_bp - d_p / model.v_p;
  bz(1, 1) = -phi36_bc - t_go * d_c;
  return bz;
}

/// Quantities available on board: LOS range/angle/rate, turret state and
/// actuator states.
struct EngagementMeasurement {
  double r = 0.0;
  double gamma = 0.0;
  double gamma_dot = 0.0;
  double psi = 0.0;
  double omega = 0.0;
  double v_c = 0.0;
  Vector x_p;
  Vector x_c;
};

inline double time_to_go(double r, double v_c) {
  if (!(v_c > 0.0)) {
    throw NoClosureError("closing speed " + std::to_string(v_c) + " m/s is not positive");
  }
  return r / v_c;
}

/**
 * Terminal projection built from measured quantities, t_go = r / v_c. The
 * LOS is extrapolated to first order, so the pointing term is
 * gamma + gamma_dot t_go - psi (the gamma - psi part wrapped).
 *
 * `blocks` must be phi_blocks(model, time_to_go(m.r, m.v_c)).
 */
inline TransformedState measured_transform(const EngagementMeasurement& m, double a_t,
                                           const LinearizedModel& model,
                                           const PhiBlocks& blocks) {
  const double t_go = time_to_go(m.r, m.v_c);
  if (m.x_p.size() != model.n_p() || m.x_c.size() != model.n_c()) {
    throw ContractViolation("measured_transform: actuator state dimension mismatch");
  }
  TransformedState z;
  z.t_go = t_go;
  z.z_d = m.gamma_dot * m.v_c * t_go * t_go +
          0.5 * a_t * std::cos(model.triangle.lead_t) * t_go * t_go +
          detail::dot_or_zero(blocks.phi15, m.x_p);
  z.z_psi = wrap_angle(m.gamma - m.psi) + m.gamma_dot * t_go - m.omega * t_go -
            detail::dot_or_zero(blocks.phi35, m.x_p) - detail::dot_or_zero(blocks.phi36, m.x_c);
  return z;
}

inline TransformedState measured_transform(const EngagementMeasurement& m, double a_t,
                                           const LinearizedModel& model) {
  return measured_transform(m, a_t, model, phi_blocks(model, time_to_go(m.r, m.v_c)));
}

}  // namespace turret_guidance
