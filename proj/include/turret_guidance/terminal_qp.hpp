#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "turret_guidance/common.hpp"
#include "turret_guidance/engagement_linearizer.hpp"
#include "turret_guidance/quadrature.hpp"
#include "turret_guidance/zem_transform.hpp"

namespace turret_guidance {

/// Relative weighting of the two command channels and their normalizers.
struct EffortWeights {
  double alpha = 0.5;
  double u1_max = 1.0;
  double u2_max = 1e-4;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must lie in (0, 1)");
    if (!(u1_max > 0.0) || !std::isfinite(u1_max)) throw InvalidConfig("u1_max must be positive");
    if (!(u2_max > 0.0) || !std::isfinite(u2_max)) throw InvalidConfig("u2_max must be positive");
  }

  /// Diagonal of the running-cost weight: alpha/u1^2, (1-alpha)/u2^2.
  [[nodiscard]] Eigen::Vector2d sigma() const {
    return {alpha / (u1_max * u1_max), (1.0 - alpha) / (u2_max * u2_max)};
  }
  [[nodiscard]] Eigen::Vector2d sigma_inverse() const {
    return {u1_max * u1_max / alpha, u2_max * u2_max / (1.0 - alpha)};
  }
  /// Turret-to-pursuer effort ratio of the ideal-dynamics cost.
  [[nodiscard]] double sigma_ratio() const {
    return (1.0 - alpha) * u1_max * u1_max / (alpha * u2_max * u2_max);
  }
};

/// Symmetric 2x2 effort Gramian; negative definite whenever t_go > 0.
struct GramianG {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;
  double delta = 0.0;

  static GramianG from_entries(double g11, double g12, double g22) {
    return {g11, g12, g22, g11 * g22 - g12 * g12};
  }
  [[nodiscard]] bool negative_definite() const { return g11 < 0.0 && delta > 0.0; }
  [[nodiscard]] Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << g11, g12, g12, g22;
    return m;
  }
  [[nodiscard]] Eigen::Matrix2d inverse() const {
    Eigen::Matrix2d m;
    m << g22, -g12, -g12, g11;
    return m / delta;
  }
};

inline constexpr int kDefaultQuadNodes = 32;

/// G = integral over the remaining time of -B_z Sigma^-1 B_z^T, by Gauss-Legendre.
inline GramianG compute_g(const LinearizedModel& model, const EffortWeights& weights,
                          double t_go, int quad_nodes = kDefaultQuadNodes) {
  if (!(t_go > 0.0)) throw NoClosureError("compute_g: t_go must be positive");
  if (quad_nodes < 8) throw ContractViolation("compute_g: need at least 8 quadrature nodes");
  const auto& rule = cached_gauss_legendre(quad_nodes);
  const Eigen::Vector2d s_inv = weights.sigma_inverse();
  const double half = 0.5 * t_go;
  double g11 = 0.0, g12 = 0.0, g22 = 0.0;
  for (int k = 0; k < quad_nodes; ++k) {
    const double s = half * (rule.nodes[k] + 1.0);
    const auto bz = bz_matrix(model, s, phi_blocks(model, s));
    const double w = half * rule.weights[k];
    g11 -= w * (s_inv(0) * bz(0, 0) * bz(0, 0) + s_inv(1) * bz(0, 1) * bz(0, 1));
    g12 -= w * (s_inv(0) * bz(0, 0) * bz(1, 0) + s_inv(1) * bz(0, 1) * bz(1, 1));
    g22 -= w * (s_inv(0) * bz(1, 0) * bz(1, 0) + s_inv(1) * bz(1, 1) * bz(1, 1));
  }
  return GramianG::from_entries(g11, g12, g22);
}

/// Which box constraints are active at the terminal optimum.
enum class ActiveCase {
  kInterior,
  kRangeUpper,  ///< c_d = +R
  kRangeLower,  ///< c_d = -R
  kFovUpper,    ///< c_psi = +delta
  kFovLower,    ///< c_psi = -delta
  kCornerRangeUpperFovUpper,
  kCornerRangeUpperFovLower,
  kCornerRangeLowerFovUpper,
  kCornerRangeLowerFovLower,
};

inline constexpr int kActiveCaseCount = 9;

inline std::string_view to_string(ActiveCase c) {
  switch (c) {
    case ActiveCase::kInterior: return "interior";
    case ActiveCase::kRangeUpper: return "range_upper";
    case ActiveCase::kRangeLower: return "range_lower";
    case ActiveCase::kFovUpper: return "fov_upper";
    case ActiveCase::kFovLower: return "fov_lower";
    case ActiveCase::kCornerRangeUpperFovUpper: return "corner_upper_upper";
    case ActiveCase::kCornerRangeUpperFovLower: return "corner_upper_lower";
    case ActiveCase::kCornerRangeLowerFovUpper: return "corner_lower_upper";
    case ActiveCase::kCornerRangeLowerFovLower: return "corner_lower_lower";
  }
  return "unknown";
}

struct TerminalSolution {
  double c_d_star = 0.0;
  double c_psi_star = 0.0;
  double p_d = 0.0;  ///< constant costate, G^-1 (c* - z0)
  double p_psi = 0.0;
  double cost = 0.0;
  ActiveCase active_case = ActiveCase::kInterior;
};

inline constexpr double kBoxSlack = 1e-12;

/// J = -1/2 (c - z0)^T G^-1 (c - z0).
inline double predicted_cost(const TransformedState& z0, double c_d, double c_psi,
                             const GramianG& g) {
  if (!g.negative_definite()) throw NumericDomainError("predicted_cost: G is not negative definite");
  const double ed = c_d - z0.z_d;
  const double ep = c_psi - z0.z_psi;
  return -0.5 * (g.g22 * ed * ed - 2.0 * g.g12 * ed * ep + g.g11 * ep * ep) / g.delta;
}

/**
 * Minimizes the terminal cost over |c_d| <= R, |c_psi| <= delta by
 * enumerating the nine KKT cases. Ties go to interior, then edges, then
 * corners, then the lexicographically smaller (c_d, c_psi).
 */
inline TerminalSolution solve_terminal_qp(const TransformedState& z0, const GramianG& g,
                                          double r_max, double fov) {
  if (!g.negative_definite()) {
    throw NumericDomainError("solve_terminal_qp: G is not negative definite (g11=" +
                             std::to_string(g.g11) + ", delta=" + std::to_string(g.delta) + ")");
  }
  if (!(r_max > 0.0)) throw ContractViolation("solve_terminal_qp: r_max must be positive");
  if (!(fov > 0.0 && fov < kPi)) throw ContractViolation("solve_terminal_qp: fov must lie in (0, pi)");

  struct Candidate {
    double c_d;
    double c_psi;
    ActiveCase tag;
    int rank;
  };
  std::array<Candidate, kActiveCaseCount> cands{};
  int count = 0;
  const auto in_range = [&](double v) { return std::abs(v) <= r_max + kBoxSlack; };
  const auto in_fov = [&](double v) { return std::abs(v) <= fov + kBoxSlack; };

  if (in_range(z0.z_d) && in_fov(z0.z_psi)) {
    cands[count++] = {z0.z_d, z0.z_psi, ActiveCase::kInterior, 0};
  }
  const double psi_at_upper = z0.z_psi + g.g12 / g.g11 * (r_max - z0.z_d);
  const double psi_at_lower = z0.z_psi + g.g12 / g.g11 * (-r_max - z0.z_d);
  const double d_at_upper = z0.z_d + g.g12 / g.g22 * (fov - z0.z_psi);
  const double d_at_lower = z0.z_d + g.g12 / g.g22 * (-fov - z0.z_psi);
  if (in_fov(psi_at_lower)) cands[count++] = {-r_max, psi_at_lower, ActiveCase::kRangeLower, 1};
  if (in_range(d_at_lower)) cands[count++] = {d_at_lower, -fov, ActiveCase::kFovLower, 1};
  if (in_range(d_at_upper)) cands[count++] = {d_at_upper, fov, ActiveCase::kFovUpper, 1};
  if (in_fov(psi_at_upper)) cands[count++] = {r_max, psi_at_upper, ActiveCase::kRangeUpper, 1};
  cands[count++] = {-r_max, -fov, ActiveCase::kCornerRangeLowerFovLower, 2};
  cands[count++] = {-r_max, fov, ActiveCase::kCornerRangeLowerFovUpper, 2};
  cands[count++] = {r_max, -fov, ActiveCase::kCornerRangeUpperFovLower, 2};
  cands[count++] = {r_max, fov, ActiveCase::kCornerRangeUpperFovUpper, 2};

  std::stable_sort(cands.begin(), cands.begin() + count, [](const Candidate& a, const Candidate& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.c_d != b.c_d) return a.c_d < b.c_d;
    return a.c_psi < b.c_psi;
  });

  int best = 0;
  double best_cost = predicted_cost(z0, cands[0].c_d, cands[0].c_psi, g);
  for (int i = 1; i < count; ++i) {
    const double cost = predicted_cost(z0, cands[i].c_d, cands[i].c_psi, g);
    if (cost < best_cost - 1e-12 * std::abs(best_cost)) {
      best = i;
      best_cost = cost;
    }
  }

  TerminalSolution sol;
  sol.c_d_star = cands[best].c_d;
  sol.c_psi_star = cands[best].c_psi;
  sol.active_case = cands[best].tag;
  sol.cost = std::max(0.0, best_cost);
  const Eigen::Vector2d p =
      g.inverse() * Eigen::Vector2d(sol.c_d_star - z0.z_d, sol.c_psi_star - z0.z_psi);
  sol.p_d = p(0);
  sol.p_psi = p(1);
  return sol;
}

}  // namespace turret_guidance
