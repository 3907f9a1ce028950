#pragma once

#include <cmath>

#include "turret_guidance/common.hpp"
#include "turret_guidance/engagement_linearizer.hpp"
#include "turret_guidance/terminal_qp.hpp"
#include "turret_guidance/zem_transform.hpp"

namespace turret_guidance {

inline constexpr double kDefaultTgoMin = 0.01;

struct GuidanceCommand {
  double u1 = 0.0;  ///< pursuer channel command
  double u2 = 0.0;  ///< turret channel command
  double c_d_star = 0.0;
  double c_psi_star = 0.0;
  double t_go = 0.0;
  bool saturated_u1 = false;
  bool saturated_u2 = false;
};

/**
 * Closed-loop optimal command for arbitrary actuator dynamics,
 *
 *   u = -Sigma^-1 B_z(t)^T G^-1 (c* - z(t)),
 *
 * where G, B_z and c* are all evaluated over the current time-to-go.
 * Throws TerminalPhase when t_go < t_go_min.
 */
inline GuidanceCommand guidance_general(const TransformedState& z, const LinearizedModel& model,
                                        const EffortWeights& weights, const GramianG& g,
                                        const TerminalSolution& sol, const PhiBlocks& blocks,
                                        double t_go_min = kDefaultTgoMin) {
  if (z.t_go < t_go_min) throw TerminalPhase("guidance_general: t_go below guard");
  const Eigen::Matrix2d bz = bz_matrix(model, z.t_go, blocks);
  const Eigen::Vector2d costate =
      g.inverse() * Eigen::Vector2d(sol.c_d_star - z.z_d, sol.c_psi_star - z.z_psi);
  const Eigen::Vector2d u = -(weights.sigma_inverse().asDiagonal() * (bz.transpose() * costate));
  GuidanceCommand cmd;
  cmd.u1 = u(0);
  cmd.u2 = u(1);
  cmd.c_d_star = sol.c_d_star;
  cmd.c_psi_star = sol.c_psi_star;
  cmd.t_go = z.t_go;
  return cmd;
}

/**
 * Closed form of the same law for ideal actuators (u1 = a_P, u2 = tau),
 * with sigma = (1 - alpha) u1_max^2 / (alpha u2_max^2):
 *
 *   a_P = -[(18 sigma + 12 T^2 v^2) e_d - 6 sigma cos v T e_psi] / (3 sigma cos T^2 + 4 v^2 cos T^4)
 *   tau = -[-18 v e_d + 12 cos T v^2 e_psi] / (3 sigma cos T + 4 v^2 cos T^3)
 *
 * with e = c* - z, T = t_go, cos = cos(lead_p).
 */
inline GuidanceCommand guidance_ideal(const TransformedState& z, double v_p, double lead_p,
                                      double sigma, const TerminalSolution& sol,
                                      double t_go_min = kDefaultTgoMin) {
  if (z.t_go < t_go_min) throw TerminalPhase("guidance_ideal: t_go below guard");
  const double cos_p = std::cos(lead_p);
  if (std::abs(cos_p) < 1e-6) {
    throw BeamAttackSingularity("guidance_ideal: lead angle is perpendicular to the LOS");
  }
  const double t = z.t_go;
  const double t2 = t * t;
  const double v2 = v_p * v_p;
  const double e_d = sol.c_d_star - z.z_d;
  const double e_psi = sol.c_psi_star - z.z_psi;
  GuidanceCommand cmd;
  cmd.u1 = -((18.0 * sigma + 12.0 * t2 * v2) * e_d - 6.0 * sigma * cos_p * v_p * t * e_psi) /
           (3.0 * sigma * cos_p * t2 + 4.0 * v2 * cos_p * t2 * t2);
  cmd.u2 = -(-18.0 * v_p * e_d + 12.0 * cos_p * t * v2 * e_psi) /
           (3.0 * sigma * cos_p * t + 4.0 * v2 * cos_p * t2 * t);
  cmd.c_d_star = sol.c_d_star;
  cmd.c_psi_star = sol.c_psi_star;
  cmd.t_go = t;
  return cmd;
}

/// Textbook augmented-PN display, -3 z_d / (cos(lead_p) t_go^2). In this
/// frame a positive a_P drives d_perp down, so the miss-nulling limit of
/// guidance_ideal is the negation of this value.
inline double apn_reference(double z_d, double t_go, double lead_p) {
  if (!(t_go > 0.0)) throw ContractViolation("apn_reference: t_go must be positive");
  return -3.0 * z_d / (std::cos(lead_p) * t_go * t_go);
}

}  // namespace turret_guidance
