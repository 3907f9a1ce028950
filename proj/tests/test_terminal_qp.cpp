#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "turret_guidance/quadrature.hpp"
#include "turret_guidance/terminal_qp.hpp"

using namespace turret_guidance;
using tg_test::rel_err;

namespace {

// Ideal-dynamics Gramian in closed form (quadratic in the normalizers).
GramianG ideal_closed_form(double t, double alpha, double u1, double u2, double v, double cos_p) {
  const double g11 = -u1 * u1 * t * t * t * cos_p * cos_p / (3.0 * alpha);
  const double g12 = -u1 * u1 * t * t * cos_p / (2.0 * alpha * v);
  const double g22 = -u1 * u1 * t / (alpha * v * v) - u2 * u2 * t * t * t / (3.0 * (1.0 - alpha));
  return GramianG::from_entries(g11, g12, g22);
}

LinearizedModel ideal_model(double lead_p, double v_p) {
  CollisionTriangle tri = tg_test::baseline_triangle();
  tri.lead_p = lead_p;
  return assemble_linear_model(tri, LtiRealization::feedthrough(1.0), LtiRealization::feedthrough(1.0),
                               v_p);
}

struct GridResult {
  double best = 0.0;
  double c_d = 0.0;
  double c_psi = 0.0;
};

GridResult grid_search(const TransformedState& z0, const GramianG& g, double r, double d, int n) {
  GridResult out{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double cd = -r + 2.0 * r * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double cp = -d + 2.0 * d * j / (n - 1);
      const double j_val = predicted_cost(z0, cd, cp, g);
      if (j_val < out.best) out = {j_val, cd, cp};
    }
  }
  return out;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 8, 16, 32, 64}) {
    const auto rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-14);
    for (int deg = 0; deg <= 2 * n - 1 && deg <= 20; ++deg) {
      double q = 0.0;
      for (int k = 0; k < n; ++k) q += rule.weights[k] * std::pow(rule.nodes[k], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(q, exact, 1e-13) << "n=" << n << " deg=" << deg;
    }
    EXPECT_TRUE(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
  }
}

TEST(EffortWeights, Validation) {
  EXPECT_THROW((EffortWeights{0.0, 1.0, 1.0}.validate()), InvalidConfig);
  EXPECT_THROW((EffortWeights{1.0, 1.0, 1.0}.validate()), InvalidConfig);
  EXPECT_THROW((EffortWeights{0.5, 0.0, 1.0}.validate()), InvalidConfig);
  EXPECT_NO_THROW((EffortWeights{0.5, 1.0, 1e-4}.validate()));
  const EffortWeights w{0.25, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(w.sigma()(0), 0.25 / 4.0);
  EXPECT_DOUBLE_EQ(w.sigma()(1), 0.75 / 0.25);
  EXPECT_DOUBLE_EQ(w.sigma_ratio(), 0.75 * 4.0 / (0.25 * 0.25));
}

TEST(ComputeG, UnitExample) {
  const auto m = ideal_model(0.0, 1.0);
  const auto g = compute_g(m, {0.5, 1.0, 1.0}, 1.0);
  EXPECT_NEAR(g.g11, -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(g.g12, -1.0, 1e-12);
  EXPECT_NEAR(g.g22, -8.0 / 3.0, 1e-12);
  EXPECT_NEAR(g.delta, 7.0 / 9.0, 1e-12);
}

TEST(ComputeG, MatchesIdealClosedForm) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> t(0.01, 30.0), alpha(0.001, 0.999), lead(-1.4, 1.4),
      v(50.0, 1000.0), log_u(-5.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double tt = t(rng), a = alpha(rng), lp = lead(rng), vp = v(rng);
    const double u1 = std::pow(10.0, log_u(rng)), u2 = std::pow(10.0, log_u(rng));
    const auto g = compute_g(ideal_model(lp, vp), {a, u1, u2}, tt);
    const auto ref = ideal_closed_form(tt, a, u1, u2, vp, std::cos(lp));
    EXPECT_LT(rel_err(g.g11, ref.g11), 1e-9);
    EXPECT_LT(rel_err(g.g12, ref.g12), 1e-9);
    EXPECT_LT(rel_err(g.g22, ref.g22), 1e-9);
  }
}

TEST(ComputeG, VanishesWithTgo) {
  const auto m = ideal_model(0.3, 400.0);
  const auto g = compute_g(m, {0.5, 1.0, 1e-4}, 1e-9);
  EXPECT_LT(std::abs(g.g11) + std::abs(g.g12) + std::abs(g.g22), 1e-12);
  EXPECT_THROW(compute_g(m, {0.5, 1.0, 1e-4}, 0.0), NoClosureError);
  EXPECT_THROW(compute_g(m, {0.5, 1.0, 1e-4}, 1.0, 4), ContractViolation);
}

TEST(ComputeG, NegativeDefiniteForRandomModels) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> t(0.01, 20.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = assemble_linear_model(tg_test::random_triangle(rng), tg_test::random_actuator(rng),
                                         tg_test::random_actuator(rng), 350.0);
    const auto g = compute_g(m, tg_test::random_weights(rng), t(rng));
    EXPECT_TRUE(g.negative_definite()) << "g11=" << g.g11 << " delta=" << g.delta;
  }
}

TEST(ComputeG, QuadratureConvergenceForLags) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> tc(0.05, 1.0), t(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = assemble_linear_model(tg_test::random_triangle(rng), tg_test::lag(tc(rng)),
                                         tg_test::lag(tc(rng)), 350.0);
    const EffortWeights w{0.5, 1.0, 1e-2};
    const double tt = t(rng);
    // Default node count against a much finer rule.
    const auto g = compute_g(m, w, tt);
    const auto ref = compute_g(m, w, tt, 128);
    EXPECT_LT(rel_err(g.g11, ref.g11), 1e-9) << "T=" << tt;
    EXPECT_LT(rel_err(g.g12, ref.g12), 1e-9) << "T=" << tt;
    EXPECT_LT(rel_err(g.g22, ref.g22), 1e-9) << "T=" << tt;
  }
}

TEST(SolveTerminalQp, InteriorCase) {
  const auto g = GramianG::from_entries(-2.0 / 3.0, -1.0, -8.0 / 3.0);
  const auto sol = solve_terminal_qp({100.0, 0.1, 5.0}, g, 500.0, kPi / 4.0);
  EXPECT_EQ(sol.active_case, ActiveCase::kInterior);
  EXPECT_EQ(sol.c_d_star, 100.0);
  EXPECT_EQ(sol.c_psi_star, 0.1);
  EXPECT_EQ(sol.cost, 0.0);
  EXPECT_EQ(sol.p_d, 0.0);
  EXPECT_EQ(sol.p_psi, 0.0);
}

TEST(SolveTerminalQp, EdgeCase) {
  const auto g = GramianG::from_entries(-2.0 / 3.0, -1.0, -8.0 / 3.0);
  const TransformedState z0{2.0, 0.0, 1.0};
  const auto sol = solve_terminal_qp(z0, g, 1.0, 3.0);
  EXPECT_EQ(sol.active_case, ActiveCase::kRangeUpper);
  EXPECT_NEAR(sol.c_d_star, 1.0, 1e-15);
  EXPECT_NEAR(sol.c_psi_star, -1.5, 1e-15);
  const auto grid = grid_search(z0, g, 1.0, 3.0, 2001);
  EXPECT_LE(sol.cost, grid.best + 1e-12);
  EXPECT_NEAR(grid.c_d, 1.0, 1e-3);
  EXPECT_NEAR(grid.c_psi, -1.5, 1e-2);
}

TEST(SolveTerminalQp, CornerCase) {
  const auto g = GramianG::from_entries(-2.0 / 3.0, -1.0, -8.0 / 3.0);
  const TransformedState z0{2.0, 0.0, 1.0};
  const auto sol = solve_terminal_qp(z0, g, 1.0, 0.5);
  EXPECT_EQ(sol.active_case, ActiveCase::kCornerRangeUpperFovLower);
  EXPECT_EQ(sol.c_d_star, 1.0);
  EXPECT_EQ(sol.c_psi_star, -0.5);
  const auto grid = grid_search(z0, g, 1.0, 0.5, 2001);
  EXPECT_LE(sol.cost, grid.best + 1e-12);
  EXPECT_NEAR(grid.c_d, 1.0, 1e-3);
  EXPECT_NEAR(grid.c_psi, -0.5, 1e-3);
}

TEST(SolveTerminalQp, RejectsIndefiniteG) {
  EXPECT_THROW(solve_terminal_qp({0.0, 0.0, 1.0}, GramianG::from_entries(-1.0, 2.0, -1.0), 1.0, 0.5),
               NumericDomainError);
  EXPECT_THROW(solve_terminal_qp({0.0, 0.0, 1.0}, GramianG::from_entries(-1.0, 0.0, -1.0), 0.0, 0.5),
               ContractViolation);
  EXPECT_THROW(solve_terminal_qp({0.0, 0.0, 1.0}, GramianG::from_entries(-1.0, 0.0, -1.0), 1.0, 4.0),
               ContractViolation);
}

TEST(SolveTerminalQp, TieBreakPrefersInterior) {
  const auto g = GramianG::from_entries(-2.0 / 3.0, -1.0, -8.0 / 3.0);
  // z0 on the range boundary: interior and range edge coincide at zero cost.
  const auto on_edge = solve_terminal_qp({1.0, 0.2, 1.0}, g, 1.0, 0.5);
  EXPECT_EQ(on_edge.active_case, ActiveCase::kInterior);
  // z0 on a corner: interior, two edges and the corner all tie.
  const auto on_corner = solve_terminal_qp({-1.0, 0.5, 1.0}, g, 1.0, 0.5);
  EXPECT_EQ(on_corner.active_case, ActiveCase::kInterior);
  EXPECT_EQ(on_corner.cost, 0.0);
}

TEST(SolveTerminalQp, DiagonalGProjectsOntoBox) {
  const auto g = GramianG::from_entries(-1.0, 0.0, -1.0);
  const auto edge = solve_terminal_qp({0.0, 5.0, 1.0}, g, 1.0, 1.0);
  EXPECT_EQ(edge.active_case, ActiveCase::kFovUpper);
  EXPECT_EQ(edge.c_d_star, 0.0);
  const auto corner = solve_terminal_qp({3.0, -3.0, 1.0}, g, 1.0, 1.0);
  EXPECT_EQ(corner.active_case, ActiveCase::kCornerRangeUpperFovLower);
}

TEST(SolveTerminalQp, EdgeSolutionsSatisfyKkt) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> nd;
  int edges = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = -std::exp(nd(rng)), c = -std::exp(nd(rng));
    const double b = 0.95 * std::sqrt(a * c) * std::tanh(nd(rng));
    const auto g = GramianG::from_entries(a, b, c);
    const TransformedState z0{3.0 * nd(rng), 3.0 * nd(rng), 1.0};
    const auto sol = solve_terminal_qp(z0, g, 1.0, 1.0);
    // Objective gradient: -G^-1 (c - z0).
    const Eigen::Vector2d grad = -g.inverse() * Eigen::Vector2d(sol.c_d_star - z0.z_d, sol.c_psi_star - z0.z_psi);
    const double scale = std::max(grad.norm(), 1e-12);
    switch (sol.active_case) {
      case ActiveCase::kRangeUpper:
      case ActiveCase::kRangeLower:
        EXPECT_LT(std::abs(grad(1)) / scale, 1e-8);
        ++edges;
        break;
      case ActiveCase::kFovUpper:
      case ActiveCase::kFovLower:
        EXPECT_LT(std::abs(grad(0)) / scale, 1e-8);
        ++edges;
        break;
      default: break;
    }
    EXPECT_LE(std::abs(sol.c_d_star), 1.0 + kBoxSlack);
    EXPECT_LE(std::abs(sol.c_psi_star), 1.0 + kBoxSlack);
    EXPECT_GE(sol.cost, 0.0);
  }
  EXPECT_GT(edges, 100);
}

TEST(SolveTerminalQp, MatchesGridSearchAcrossAllCases) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> nd;
  std::set<ActiveCase> seen;
  for (int trial = 0; trial < 60; ++trial) {
    const double a = -std::exp(nd(rng)), c = -std::exp(nd(rng));
    const double b = 0.9 * std::sqrt(a * c) * std::tanh(nd(rng));
    const auto g = GramianG::from_entries(a, b, c);
    const double r = std::exp(nd(rng)), d = 0.2 + 1.2 * std::abs(std::tanh(nd(rng)));
    const TransformedState z0{2.0 * r * nd(rng), 2.0 * d * nd(rng), 1.0};
    const auto sol = solve_terminal_qp(z0, g, r, d);
    seen.insert(sol.active_case);
    const auto grid = grid_search(z0, g, r, d, 401);
    EXPECT_LE(sol.cost, grid.best * (1.0 + 1e-12) + 1e-15);
    // Nearest grid node to c* is within half a cell in each direction.
    const double hd = r / 400.0, hp = d / 400.0;
    const Eigen::Vector2d grad = -g.inverse() * Eigen::Vector2d(sol.c_d_star - z0.z_d, sol.c_psi_star - z0.z_psi);
    const Eigen::Matrix2d hess = -g.inverse();
    const double bound = std::abs(grad(0)) * hd + std::abs(grad(1)) * hp +
                         0.5 * (std::abs(hess(0, 0)) * hd * hd + 2.0 * std::abs(hess(0, 1)) * hd * hp +
                                std::abs(hess(1, 1)) * hp * hp);
    EXPECT_LE(grid.best - sol.cost, bound + 1e-12);
  }
  EXPECT_GE(seen.size(), 5u);
}

TEST(PredictedCost, ZeroAtZ0AndPositiveElsewhere) {
  const auto g = GramianG::from_entries(-2.0 / 3.0, -1.0, -8.0 / 3.0);
  const TransformedState z0{0.3, -0.2, 1.0};
  EXPECT_EQ(predicted_cost(z0, 0.3, -0.2, g), 0.0);
  std::mt19937_64 rng(46);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 100; ++i) EXPECT_GT(predicted_cost(z0, 0.3 + nd(rng), -0.2 + nd(rng), g), 0.0);
}

TEST(ActiveCase, Names) {
  EXPECT_EQ(to_string(ActiveCase::kInterior), "interior");
  EXPECT_EQ(to_string(ActiveCase::kCornerRangeLowerFovUpper), "corner_lower_upper");
}
