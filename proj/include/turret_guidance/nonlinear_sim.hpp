#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "turret_guidance/common.hpp"
#include "turret_guidance/engagement_linearizer.hpp"
#include "turret_guidance/guidance_law.hpp"
#include "turret_guidance/lti_models.hpp"
#include "turret_guidance/terminal_qp.hpp"
#include "turret_guidance/zem_transform.hpp"

namespace turret_guidance {

struct VehiclePose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  [[nodiscard]] Point2 position() const { return {x, y}; }
};

/// Full nonlinear world state.
struct EngagementState {
  double t = 0.0;
  VehiclePose pursuer;
  double psi = 0.0;    ///< turret boresight angle
  double omega = 0.0;  ///< turret slew rate
  VehiclePose target;
  Vector x_p_act;
  Vector x_c_act;
};

/// Everything the closed loop needs besides the state.
struct EngagementParams {
  double v_p = 400.0;
  double v_t = 350.0;
  double a_t = 0.0;
  EffortWeights weights;
  double r_max = 500.0;
  double fov = kPi / 4.0;
  LtiRealization pursuer_dyn;
  LtiRealization turret_dyn;
  double dt = 1e-3;
  double log_dt = 1e-2;
  /// Guidance sample period; 0 recomputes the command every integration step.
  double guidance_period = 0.0;
  double t_go_min = kDefaultTgoMin;
  bool saturation = false;
  int quad_nodes = kDefaultQuadNodes;

  void validate() const {
    weights.validate();
    if (!(v_p > 0.0)) throw InvalidConfig("v_p must be positive");
    if (!(v_t > 0.0)) throw InvalidConfig("v_t must be positive");
    if (!std::isfinite(a_t)) throw InvalidConfig("a_t must be finite");
    if (!(r_max > 0.0)) throw InvalidConfig("r_max must be positive");
    if (!(fov > 0.0 && fov < kPi)) throw InvalidConfig("fov must lie in (0, pi)");
    if (!(dt > 0.0)) throw InvalidConfig("dt must be positive");
    if (!(log_dt >= dt)) throw InvalidConfig("log_dt must be at least dt");
    const double ratio = log_dt / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
      throw InvalidConfig("log_dt must be an integer multiple of dt");
    }
    if (!(guidance_period >= 0.0)) throw InvalidConfig("guidance_period must be non-negative");
    if (guidance_period > 0.0) {
      const double hold = guidance_period / dt;
      if (hold < 1.0 - 1e-9 || std::abs(hold - std::round(hold)) > 1e-6 * hold) {
        throw InvalidConfig("guidance_period must be an integer multiple of dt");
      }
    }
    if (!(t_go_min > 0.0)) throw InvalidConfig("t_go_min must be positive");
    if (quad_nodes < 8) throw InvalidConfig("quad_nodes must be at least 8");
    if (4 + pursuer_dyn.order() + turret_dyn.order() > kMaxStates) {
      throw InvalidConfig("actuator orders exceed the supported state dimension");
    }
  }
};

/// Sets up an engagement with zeroed actuator states.
inline EngagementState initial_state(VehiclePose pursuer, VehiclePose target, double psi0,
                                     double omega0, const EngagementParams& params) {
  EngagementState s;
  s.pursuer = pursuer;
  s.pursuer.theta = wrap_angle(pursuer.theta);
  s.target = target;
  s.target.theta = wrap_angle(target.theta);
  s.psi = wrap_angle(psi0);
  s.omega = omega0;
  s.x_p_act = Vector::Zero(params.pursuer_dyn.order());
  s.x_c_act = Vector::Zero(params.turret_dyn.order());
  return s;
}

/// LOS range, angle, and their rates from the nonlinear kinematics.
struct LosKinematics {
  double r = 0.0;
  double gamma = 0.0;
  double r_dot = 0.0;
  double gamma_dot = 0.0;
};

inline LosKinematics los_kinematics(const EngagementState& s, double v_p, double v_t) {
  const auto los = los_polar(s.pursuer.position(), s.target.position());
  LosKinematics k;
  k.r = los.range;
  k.gamma = los.angle;
  k.r_dot = v_t * std::cos(s.target.theta - k.gamma) - v_p * std::cos(s.pursuer.theta - k.gamma);
  k.gamma_dot = k.r > 0.0 ? (v_t * std::sin(s.target.theta - k.gamma) -
                             v_p * std::sin(s.pursuer.theta - k.gamma)) /
                                k.r
                          : 0.0;
  return k;
}

namespace detail {

struct StateDerivative {
  double x_p, y_p, theta_p, psi, omega, x_t, y_t, theta_t;
  Vector x_p_act, x_c_act;
};

inline StateDerivative engagement_derivative(const EngagementState& s, double u1, double u2,
                                             const EngagementParams& p) {
  const double a_p = p.pursuer_dyn.output(s.x_p_act, u1);
  const double tau = p.turret_dyn.output(s.x_c_act, u2);
  StateDerivative d;
  d.x_p = p.v_p * std::cos(s.pursuer.theta);
  d.y_p = p.v_p * std::sin(s.pursuer.theta);
  d.theta_p = a_p / p.v_p;
  d.psi = a_p / p.v_p + s.omega;
  d.omega = tau;
  d.x_t = p.v_t * std::cos(s.target.theta);
  d.y_t = p.v_t * std::sin(s.target.theta);
  d.theta_t = p.a_t / p.v_t;
  d.x_p_act = p.pursuer_dyn.derivative(s.x_p_act, u1);
  d.x_c_act = p.turret_dyn.derivative(s.x_c_act, u2);
  return d;
}

// Unwrapped Euler update, used for the RK4 stages.
inline EngagementState advance(const EngagementState& s, const StateDerivative& d, double h) {
  EngagementState n = s;
  n.t = s.t + h;
  n.pursuer.x += h * d.x_p;
  n.pursuer.y += h * d.y_p;
  n.pursuer.theta += h * d.theta_p;
  n.psi += h * d.psi;
  n.omega += h * d.omega;
  n.target.x += h * d.x_t;
  n.target.y += h * d.y_t;
  n.target.theta += h * d.theta_t;
  n.x_p_act += h * d.x_p_act;
  n.x_c_act += h * d.x_c_act;
  return n;
}

}  // namespace detail

/// One RK4 step of the coupled kinematics with (u1, u2) held over the step.
inline EngagementState step(const EngagementState& s, double u1, double u2, double dt,
                            const EngagementParams& p) {
  if (!(dt > 0.0)) throw ContractViolation("step: dt must be positive");
  using detail::advance;
  using detail::engagement_derivative;
  const auto k1 = engagement_derivative(s, u1, u2, p);
  const auto k2 = engagement_derivative(advance(s, k1, 0.5 * dt), u1, u2, p);
  const auto k3 = engagement_derivative(advance(s, k2, 0.5 * dt), u1, u2, p);
  const auto k4 = engagement_derivative(advance(s, k3, dt), u1, u2, p);
  EngagementState n = s;
  const double w = dt / 6.0;
  n.t = s.t + dt;
  n.pursuer.x += w * (k1.x_p + 2.0 * k2.x_p + 2.0 * k3.x_p + k4.x_p);
  n.pursuer.y += w * (k1.y_p + 2.0 * k2.y_p + 2.0 * k3.y_p + k4.y_p);
  n.pursuer.theta = wrap_angle(
      s.pursuer.theta + w * (k1.theta_p + 2.0 * k2.theta_p + 2.0 * k3.theta_p + k4.theta_p));
  n.psi = wrap_angle(s.psi + w * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi));
  n.omega += w * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
  n.target.x += w * (k1.x_t + 2.0 * k2.x_t + 2.0 * k3.x_t + k4.x_t);
  n.target.y += w * (k1.y_t + 2.0 * k2.y_t + 2.0 * k3.y_t + k4.y_t);
  n.target.theta = wrap_angle(
      s.target.theta + w * (k1.theta_t + 2.0 * k2.theta_t + 2.0 * k3.theta_t + k4.theta_t));
  n.x_p_act += w * (k1.x_p_act + 2.0 * k2.x_p_act + 2.0 * k3.x_p_act + k4.x_p_act);
  n.x_c_act += w * (k1.x_c_act + 2.0 * k2.x_c_act + 2.0 * k3.x_c_act + k4.x_c_act);
  return n;
}

/// Everything produced by one guidance evaluation.
struct GuidanceEvaluation {
  LosKinematics los;
  TransformedState z;
  GramianG g;
  TerminalSolution solution;
  GuidanceCommand command;
};

/**
 * Re-linearizes about the current geometry and returns the optimal command.
 * Throws NoClosureError when the LOS is opening and TerminalPhase when
 * t_go < t_go_min.
 */
inline GuidanceEvaluation evaluate_guidance(const EngagementState& s, const EngagementParams& p) {
  GuidanceEvaluation ev;
  ev.los = los_kinematics(s, p.v_p, p.v_t);
  const auto triangle = freeze_triangle(s.t, s.pursuer.position(), s.pursuer.theta, p.v_p,
                                        s.target.position(), s.target.theta, p.v_t);
  const auto model = assemble_linear_model(triangle, p.pursuer_dyn, p.turret_dyn, p.v_p);
  const double t_go = triangle.t_f - s.t;
  if (t_go < p.t_go_min) throw TerminalPhase("evaluate_guidance: t_go below guard");
  const auto blocks = phi_blocks(model, t_go);
  EngagementMeasurement m;
  m.r = ev.los.r;
  m.gamma = ev.los.gamma;
  m.gamma_dot = ev.los.gamma_dot;
  m.psi = s.psi;
  m.omega = s.omega;
  m.v_c = triangle.v_c;
  m.x_p = s.x_p_act;
  m.x_c = s.x_c_act;
  ev.z = measured_transform(m, p.a_t, model, blocks);
  ev.g = compute_g(model, p.weights, ev.z.t_go, p.quad_nodes);
  ev.solution = solve_terminal_qp(ev.z, ev.g, p.r_max, p.fov);
  ev.command = guidance_general(ev.z, model, p.weights, ev.g, ev.solution, blocks, p.t_go_min);
  if (p.saturation) {
    const double c1 = std::clamp(ev.command.u1, -p.weights.u1_max, p.weights.u1_max);
    const double c2 = std::clamp(ev.command.u2, -p.weights.u2_max, p.weights.u2_max);
    ev.command.saturated_u1 = c1 != ev.command.u1;
    ev.command.saturated_u2 = c2 != ev.command.u2;
    ev.command.u1 = c1;
    ev.command.u2 = c2;
  }
  return ev;
}

struct CaptureVerdict {
  bool captured = false;
  double t_end = 0.0;
  double r_end = 0.0;
  double pointing_err_end = 0.0;  ///< wrap(gamma - psi)
  double normalized_range = 0.0;
  double normalized_orientation = 0.0;
};

inline CaptureVerdict capture_check(const EngagementState& s, double r_max, double fov) {
  const auto los = los_polar(s.pursuer.position(), s.target.position());
  CaptureVerdict v;
  v.t_end = s.t;
  v.r_end = los.range;
  v.pointing_err_end = wrap_angle(los.angle - s.psi);
  v.normalized_range = los.range / r_max;
  v.normalized_orientation = v.pointing_err_end / fov;
  v.captured = v.normalized_range <= 1.0 && std::abs(v.normalized_orientation) <= 1.0;
  return v;
}

struct LogSample {
  EngagementState state;
  double r = 0.0;
  double gamma = 0.0;
  double gamma_dot = 0.0;
  double t_go = 0.0;
  double z_d = 0.0;
  double z_psi = 0.0;
  double c_d_star = 0.0;
  double c_psi_star = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double a_p = 0.0;
  double tau = 0.0;
  double j_running = 0.0;
};

/// Fixed-rate samples, period log_dt.
struct TrajectoryLog {
  double log_dt = 0.0;
  std::vector<LogSample> samples;
};

enum class Termination { kClosestApproach, kTgoGuard };

struct EngagementResult {
  TrajectoryLog log;
  CaptureVerdict verdict;
  EngagementState final_state;
  Termination termination = Termination::kClosestApproach;
  double total_cost = 0.0;
  double peak_u1 = 0.0;
  double peak_u2 = 0.0;
  double peak_a_p = 0.0;
  double peak_tau = 0.0;
  double initial_t_f = 0.0;  ///< intercept time predicted at launch
  std::optional<EngagementState> state_at_initial_t_f;
  std::size_t steps = 0;
};

class RunawayEngagement : public std::runtime_error {
 public:
  RunawayEngagement(const std::string& what, TrajectoryLog partial)
      : std::runtime_error(what), partial_log_(std::move(partial)) {}
  [[nodiscard]] const TrajectoryLog& partial_log() const { return partial_log_; }

 private:
  TrajectoryLog partial_log_;
};

namespace detail {

inline double running_cost_rate(double u1, double u2, const EffortWeights& w) {
  const double n1 = u1 / w.u1_max;
  const double n2 = u2 / w.u2_max;
  return 0.5 * (w.alpha * n1 * n1 + (1.0 - w.alpha) * n2 * n2);
}

// Sub-step h in (0, dt] at which r_dot crosses zero, by Illinois regula falsi.
inline double locate_closest_approach(const EngagementState& s, double u1, double u2, double dt,
                                      const EngagementParams& p) {
  const auto rdot_at = [&](double h) {
    return los_kinematics(step(s, u1, u2, h, p), p.v_p, p.v_t).r_dot;
  };
  double lo = 0.0;
  double hi = dt;
  double f_lo = los_kinematics(s, p.v_p, p.v_t).r_dot;
  double f_hi = rdot_at(dt);
  int side = 0;
  for (int iter = 0; iter < 100 && hi - lo > 1e-14; ++iter) {
    const double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    const double f_mid = rdot_at(mid);
    if (f_mid >= 0.0) {
      hi = mid;
      f_hi = f_mid;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    } else {
      lo = mid;
      f_lo = f_mid;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    }
    if (f_mid == 0.0) break;
  }
  return hi;
}

}  // namespace detail

/**
 * Closed-loop engagement under the optimal law, re-linearized every step.
 * Runs until the first closest approach (r_dot >= 0, located inside the
 * step) or until t_go drops under the guard.
 */
inline EngagementResult run_engagement(const EngagementState& initial, const EngagementParams& p) {
  p.validate();
  if (initial.x_p_act.size() != p.pursuer_dyn.order() ||
      initial.x_c_act.size() != p.turret_dyn.order()) {
    throw ContractViolation("run_engagement: actuator state dimension mismatch");
  }
  const auto los0 = los_kinematics(initial, p.v_p, p.v_t);
  const double r0 = los0.r;
  const double initial_t_f = initial.t + terminal_time(r0, -los0.r_dot);
  const double t_limit = initial.t + 10.0 * (initial_t_f - initial.t) + 10.0;
  const auto log_every = static_cast<std::size_t>(std::llround(p.log_dt / p.dt));
  const auto hold_steps =
      p.guidance_period > 0.0 ? static_cast<std::size_t>(std::llround(p.guidance_period / p.dt)) : 1;

  EngagementResult res;
  res.initial_t_f = initial_t_f;
  res.log.log_dt = p.log_dt;
  EngagementState s = initial;
  double cost = 0.0;

  GuidanceEvaluation ev;
  for (std::size_t k = 0;; ++k) {
    const bool sample = k % hold_steps == 0;
    if (sample || k % log_every == 0) {
      // Off-sample evaluations only refresh the logged quantities; the command stays held.
      GuidanceCommand held = ev.command;
      try {
        ev = evaluate_guidance(s, p);
      } catch (const TerminalPhase&) {
        res.termination = Termination::kTgoGuard;
        break;
      } catch (const NoClosureError&) {
        // r_dot >= 0 at a step boundary.
        res.termination = Termination::kClosestApproach;
        break;
      }
      if (!sample) ev.command = held;
    }
    const double u1 = ev.command.u1;
    const double u2 = ev.command.u2;
    const double a_p = p.pursuer_dyn.output(s.x_p_act, u1);
    const double tau = p.turret_dyn.output(s.x_c_act, u2);
    res.peak_u1 = std::max(res.peak_u1, std::abs(u1));
    res.peak_u2 = std::max(res.peak_u2, std::abs(u2));
    res.peak_a_p = std::max(res.peak_a_p, std::abs(a_p));
    res.peak_tau = std::max(res.peak_tau, std::abs(tau));

    if (k % log_every == 0) {
      LogSample smp;
      smp.state = s;
      smp.r = ev.los.r;
      smp.gamma = ev.los.gamma;
      smp.gamma_dot = ev.los.gamma_dot;
      smp.t_go = ev.z.t_go;
      smp.z_d = ev.z.z_d;
      smp.z_psi = ev.z.z_psi;
      smp.c_d_star = ev.solution.c_d_star;
      smp.c_psi_star = ev.solution.c_psi_star;
      smp.u1 = u1;
      smp.u2 = u2;
      smp.a_p = a_p;
      smp.tau = tau;
      smp.j_running = cost;
      res.log.samples.push_back(std::move(smp));
    }

    EngagementState next = step(s, u1, u2, p.dt, p);
    const auto los_next = los_kinematics(next, p.v_p, p.v_t);
    const double rate = detail::running_cost_rate(u1, u2, p.weights);
    if (!res.state_at_initial_t_f && s.t <= initial_t_f && next.t > initial_t_f) {
      res.state_at_initial_t_f = step(s, u1, u2, initial_t_f - s.t, p);
    }
    if (los_next.r_dot >= 0.0) {
      const double h = detail::locate_closest_approach(s, u1, u2, p.dt, p);
      cost += rate * h;
      s = step(s, u1, u2, h, p);
      res.termination = Termination::kClosestApproach;
      ++res.steps;
      break;
    }
    cost += rate * p.dt;
    s = std::move(next);
    ++res.steps;
    if (los_next.r > 10.0 * r0 || s.t > t_limit) {
      throw RunawayEngagement("engagement diverged at t=" + std::to_string(s.t) +
                                  " s (r=" + std::to_string(los_next.r) + " m)",
                              std::move(res.log));
    }
  }

  res.final_state = s;
  res.total_cost = cost;
  res.verdict = capture_check(s, p.r_max, p.fov);
  return res;
}

}  // namespace turret_guidance
