#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "turret_guidance/engagement_linearizer.hpp"

using namespace turret_guidance;

TEST(LosPolar, BaselineGeometry) {
  const auto los = los_polar({0.0, 0.0}, {5000.0, 0.0});
  EXPECT_DOUBLE_EQ(los.range, 5000.0);
  EXPECT_DOUBLE_EQ(los.angle, 0.0);
}

TEST(LosPolar, AxisCase) {
  const auto los = los_polar({0.0, 0.0}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(los.range, 1.0);
  EXPECT_DOUBLE_EQ(los.angle, kPi / 2.0);
}

TEST(LosPolar, CoincidentPositionsConvention) {
  const auto los = los_polar({1.0, 1.0}, {1.0, 1.0});
  EXPECT_EQ(los.range, 0.0);
  EXPECT_EQ(los.angle, 0.0);
}

TEST(LosPolar, AngleInHalfOpenRange) {
  // Straight behind: atan2(0, -1) = pi, which is inside (-pi, pi].
  EXPECT_DOUBLE_EQ(los_polar({0.0, 0.0}, {-3.0, 0.0}).angle, kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
}

TEST(ClosingSpeed, BaselineValue) {
  // 400 cos(pi/4) - 350 cos(3pi/4) = 750 / sqrt(2).
  const double vc = closing_speed(400.0, kPi / 4.0, 350.0, 3.0 * kPi / 4.0, 0.0);
  EXPECT_NEAR(vc, 750.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(vc, 530.33, 5e-3);
}

TEST(ClosingSpeed, HeadOnAndTailChase) {
  EXPECT_DOUBLE_EQ(closing_speed(400.0, 0.0, 350.0, kPi, 0.0), 750.0);
  EXPECT_DOUBLE_EQ(closing_speed(400.0, 0.0, 350.0, 0.0, 0.0), 50.0);
}

TEST(TerminalTime, Values) {
  EXPECT_NEAR(terminal_time(5000.0, 750.0 / std::sqrt(2.0)), 5000.0 * std::sqrt(2.0) / 750.0, 1e-12);
  EXPECT_NEAR(terminal_time(5000.0, 530.33), 9.4281, 1e-4);
  EXPECT_EQ(terminal_time(0.0, 100.0), 0.0);
  EXPECT_THROW(terminal_time(5000.0, -10.0), NoClosureError);
  EXPECT_THROW(terminal_time(5000.0, 0.0), NoClosureError);
}

TEST(FreezeTriangle, BaselineFields) {
  const auto tri = tg_test::baseline_triangle();
  EXPECT_DOUBLE_EQ(tri.gamma0, 0.0);
  EXPECT_DOUBLE_EQ(tri.r0, 5000.0);
  EXPECT_DOUBLE_EQ(tri.lead_p, kPi / 4.0);
  EXPECT_DOUBLE_EQ(tri.lead_t, 3.0 * kPi / 4.0);
  EXPECT_NEAR(tri.t_f, tri.r0 / tri.v_c, 1e-12);
}

TEST(FreezeTriangle, TerminalTimeIsAbsolute) {
  const auto tri = freeze_triangle(2.5, {0.0, 0.0}, 0.0, 400.0, {750.0, 0.0}, kPi, 350.0);
  EXPECT_DOUBLE_EQ(tri.t_f, 3.5);
}

TEST(FreezeTriangle, OpeningGeometryHasNoTerminalTime) {
  EXPECT_THROW(freeze_triangle(0.0, {0.0, 0.0}, 0.0, 200.0, {1000.0, 0.0}, 0.0, 350.0), NoClosureError);
}

TEST(AssembleLinearModel, IdealCase) {
  const auto tri = tg_test::baseline_triangle();
  const auto m = assemble_linear_model(tri, LtiRealization::feedthrough(1.0),
                                       LtiRealization::feedthrough(1.0), 400.0);
  ASSERT_EQ(m.state_dim(), 4);
  Eigen::MatrixXd a_expected = Eigen::MatrixXd::Zero(4, 4);
  a_expected(0, 1) = 1.0;
  a_expected(2, 3) = 1.0;
  EXPECT_EQ(Eigen::MatrixXd(m.a_matrix), a_expected);
  Eigen::MatrixXd b1_expected(4, 2);
  b1_expected << 0, 0, -std::cos(tri.lead_p), 0, 1.0 / 400.0, 0, 0, 1;
  EXPECT_EQ(Eigen::MatrixXd(m.b1_matrix), b1_expected);
  Eigen::VectorXd b2_expected = Eigen::VectorXd::Zero(4);
  b2_expected(1) = std::cos(tri.lead_t);
  EXPECT_EQ(Eigen::VectorXd(m.b2_vector), b2_expected);
}

TEST(AssembleLinearModel, FirstOrderLagPursuer) {
  const auto tri = tg_test::baseline_triangle();
  const auto lag = tg_test::lag(0.25);
  const auto m = assemble_linear_model(tri, lag, LtiRealization::feedthrough(1.0), 400.0);
  ASSERT_EQ(m.state_dim(), 5);
  const double c = lag.c()(0);
  EXPECT_DOUBLE_EQ(m.a_matrix(1, 4), -std::cos(tri.lead_p) * c);
  EXPECT_DOUBLE_EQ(m.a_matrix(2, 4), c / 400.0);
  EXPECT_DOUBLE_EQ(m.a_matrix(4, 4), lag.a()(0, 0));
  EXPECT_DOUBLE_EQ(m.b1_matrix(4, 0), lag.b()(0));
  // Zero feedthrough: no direct input into the kinematic rows.
  EXPECT_EQ(m.b1_matrix(1, 0), 0.0);
  EXPECT_EQ(m.b1_matrix(2, 0), 0.0);
}

TEST(AssembleLinearModel, BlockSparsity) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tri = tg_test::random_triangle(rng);
    const auto pd = tg_test::random_actuator(rng);
    const auto cd = tg_test::second_order(3.0, 0.6);
    const auto m = assemble_linear_model(tri, pd, cd, 350.0);
    const int op = m.pursuer_offset(), oc = m.turret_offset();
    // Rows 1-3 never touch the turret actuator block; only row omega does.
    for (int r = 0; r < 3; ++r)
      for (int j = 0; j < m.n_c(); ++j) EXPECT_EQ(m.a_matrix(r, oc + j), 0.0);
    for (int j = 0; j < m.n_c(); ++j) EXPECT_EQ(m.a_matrix(3, oc + j), cd.c()(j));
    // Actuator cross-blocks are zero.
    for (int i = 0; i < m.n_p(); ++i)
      for (int j = 0; j < m.n_c(); ++j) {
        EXPECT_EQ(m.a_matrix(op + i, oc + j), 0.0);
        EXPECT_EQ(m.a_matrix(oc + j, op + i), 0.0);
      }
    // B2 has a single entry.
    for (int r = 0; r < m.state_dim(); ++r) {
      EXPECT_EQ(m.b2_vector(r), r == 1 ? std::cos(tri.lead_t) : 0.0);
    }
  }
}

TEST(AssembleLinearModel, DeterministicBitIdentical) {
  const auto tri = tg_test::baseline_triangle();
  const auto a = assemble_linear_model(tri, tg_test::lag(0.3), tg_test::second_order(5, 0.5), 400.0);
  const auto b = assemble_linear_model(tri, tg_test::lag(0.3), tg_test::second_order(5, 0.5), 400.0);
  EXPECT_EQ(Eigen::MatrixXd(a.a_matrix), Eigen::MatrixXd(b.a_matrix));
  EXPECT_EQ(Eigen::MatrixXd(a.b1_matrix), Eigen::MatrixXd(b.b1_matrix));
}

TEST(AssembleLinearModel, DoubleIntegratorChain) {
  // Unforced from [0, v, 0, 0]: d_perp(t) = v t.
  const auto m = assemble_linear_model(tg_test::baseline_triangle(), tg_test::lag(0.2),
                                       LtiRealization::feedthrough(1.0), 400.0);
  Vector x = Vector::Zero(m.state_dim());
  x(1) = 12.5;
  const auto f = [&](double, const Vector& s) -> Vector { return m.a_matrix * s; };
  double t = 0.0;
  for (int k = 0; k < 400; ++k, t += 0.01) x = tg_test::rk4_step<Vector>(f, t, x, 0.01);
  EXPECT_NEAR(x(0), 12.5 * t, 1e-10);
}

TEST(AssembleLinearModel, RejectsNonPositiveSpeed) {
  EXPECT_THROW(assemble_linear_model(tg_test::baseline_triangle(), LtiRealization::feedthrough(1.0),
                                     LtiRealization::feedthrough(1.0), 0.0),
               ContractViolation);
}
