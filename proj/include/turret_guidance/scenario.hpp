#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "turret_guidance/common.hpp"
#include "turret_guidance/lti_models.hpp"
#include "turret_guidance/nonlinear_sim.hpp"

namespace turret_guidance {

/// One engagement, as read from a config file. Defaults are the baseline
/// scenario: pursuer at the origin heading 45 deg, target 5 km down-range
/// heading 135 deg.
struct ScenarioConfig {
  VehiclePose pursuer{0.0, 0.0, kPi / 4.0};
  VehiclePose target{5000.0, 0.0, 3.0 * kPi / 4.0};
  double v_p = 400.0;
  double v_t = 350.0;
  double psi0 = kPi / 2.0;
  double omega0 = 0.0;
  double alpha = 0.5;
  double r_max = 500.0;
  double fov = kPi / 4.0;
  double u1_max = 1.0;
  double u2_max = 1e-4;
  double a_t = 0.0;
  ActuatorPreset pursuer_actuator = IdealActuator{};
  ActuatorPreset turret_actuator = IdealActuator{};
  double dt = 1e-3;
  double log_dt = 1e-2;
  double guidance_period = 0.0;
  double t_go_min = kDefaultTgoMin;
  bool saturation = false;
  int quad_nodes = kDefaultQuadNodes;
  std::uint64_t seed = 0;  // nothing stochastic yet

  [[nodiscard]] EngagementParams params() const {
    EngagementParams p;
    p.v_p = v_p;
    p.v_t = v_t;
    p.a_t = a_t;
    p.weights = {alpha, u1_max, u2_max};
    p.r_max = r_max;
    p.fov = fov;
    p.pursuer_dyn = expand_preset(pursuer_actuator);
    p.turret_dyn = expand_preset(turret_actuator);
    p.dt = dt;
    p.log_dt = log_dt;
    p.guidance_period = guidance_period;
    p.t_go_min = t_go_min;
    p.saturation = saturation;
    p.quad_nodes = quad_nodes;
    return p;
  }

  void validate() const { params().validate(); }

  [[nodiscard]] EngagementState initial() const {
    return initial_state(pursuer, target, psi0, omega0, params());
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

inline bool parse_plain_number(std::string_view s, double& out) {
  s = trim(s);
  if (s == "pi") {
    out = kPi;
    return true;
  }
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Parses "1.5", "-2e-3", "pi", "3*pi/4", "-pi/2": a product/quotient of
/// numbers and `pi`, with an optional leading sign.
inline double parse_number(std::string_view text, std::string_view key) {
  std::string_view s = detail::trim(text);
  const auto fail = [&]() -> double {
    throw InvalidConfig(std::string(key) + ": cannot parse number '" + std::string(text) + "'");
  };
  if (s.empty()) return fail();
  double sign = 1.0;
  if (s.front() == '-' || s.front() == '+') {
    if (s.front() == '-') sign = -1.0;
    s.remove_prefix(1);
  }
  double value = 0.0;
  char op = '*';
  bool first = true;
  while (true) {
    const auto pos = s.find_first_of("*/");
    double factor = 0.0;
    if (!detail::parse_plain_number(s.substr(0, pos), factor)) return fail();
    if (first) {
      value = factor;
      first = false;
    } else if (op == '*') {
      value *= factor;
    } else {
      value /= factor;
    }
    if (pos == std::string_view::npos) break;
    op = s[pos];
    s = s.substr(pos + 1);
  }
  value *= sign;
  if (!std::isfinite(value)) return fail();
  return value;
}

inline bool parse_bool(std::string_view text, std::string_view key) {
  const auto s = detail::trim(text);
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw InvalidConfig(std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

/// "ideal" or "first_order_lag:T".
inline ActuatorPreset parse_actuator(std::string_view text, std::string_view key) {
  const std::string s = detail::unquote(detail::trim(text));
  if (s == "ideal") return IdealActuator{};
  constexpr std::string_view kLag = "first_order_lag:";
  if (s.rfind(kLag, 0) == 0) {
    const double tc = parse_number(std::string_view(s).substr(kLag.size()), key);
    if (!(tc > 0.0)) throw InvalidConfig(std::string(key) + ": time constant must be positive");
    return FirstOrderLag{tc};
  }
  throw InvalidConfig(std::string(key) + ": unknown actuator '" + s +
                      "' (expected ideal or first_order_lag:T)");
}

inline std::string actuator_name(const ActuatorPreset& preset) {
  if (std::holds_alternative<FirstOrderLag>(preset)) {
    std::ostringstream os;
    os.precision(17);
    os << "first_order_lag:" << std::get<FirstOrderLag>(preset).time_constant;
    return os.str();
  }
  if (std::holds_alternative<CustomActuator>(preset)) return "custom";
  return "ideal";
}

/// Applies one `key = value` assignment. Unknown keys are errors.
inline void set_config_value(ScenarioConfig& c, std::string_view key, std::string_view value) {
  const auto num = [&] { return parse_number(value, key); };
  if (key == "pursuer.x") c.pursuer.x = num();
  else if (key == "pursuer.y") c.pursuer.y = num();
  else if (key == "pursuer.theta") c.pursuer.theta = num();
  else if (key == "target.x") c.target.x = num();
  else if (key == "target.y") c.target.y = num();
  else if (key == "target.theta" || key == "theta_t0") c.target.theta = num();
  else if (key == "v_p") c.v_p = num();
  else if (key == "v_t") c.v_t = num();
  else if (key == "psi0") c.psi0 = num();
  else if (key == "omega0") c.omega0 = num();
  else if (key == "alpha") c.alpha = num();
  else if (key == "r_max") c.r_max = num();
  else if (key == "fov") c.fov = num();
  else if (key == "u1_max") c.u1_max = num();
  else if (key == "u2_max") c.u2_max = num();
  else if (key == "a_t") c.a_t = num();
  else if (key == "actuator.pursuer") c.pursuer_actuator = parse_actuator(value, key);
  else if (key == "actuator.turret") c.turret_actuator = parse_actuator(value, key);
  else if (key == "dt") c.dt = num();
  else if (key == "log_dt") c.log_dt = num();
  else if (key == "guidance_period") c.guidance_period = num();
  else if (key == "t_go_min") c.t_go_min = num();
  else if (key == "saturation") c.saturation = parse_bool(value, key);
  else if (key == "quad_nodes") {
    const double n = num();
    if (n != std::floor(n) || n < 1 || n > 1024) throw InvalidConfig("quad_nodes: expected an integer");
    c.quad_nodes = static_cast<int>(n);
  } else if (key == "seed") {
    const double n = num();
    if (n != std::floor(n) || n < 0) throw InvalidConfig("seed: expected a non-negative integer");
    c.seed = static_cast<std::uint64_t>(n);
  } else {
    throw InvalidConfig("unknown key '" + std::string(key) + "'");
  }
}

namespace detail {

// Re-raises a params().validate() failure with the config key it concerns.
inline void validate_with_keys(const ScenarioConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InvalidConfig("alpha: must lie in (0, 1)");
  if (!(c.fov > 0.0 && c.fov < kPi)) throw InvalidConfig("fov: must lie in (0, pi)");
  if (!(c.r_max > 0.0)) throw InvalidConfig("r_max: must be positive");
  if (!(c.u1_max > 0.0)) throw InvalidConfig("u1_max: must be positive");
  if (!(c.u2_max > 0.0)) throw InvalidConfig("u2_max: must be positive");
  if (!(c.v_p > 0.0)) throw InvalidConfig("v_p: must be positive");
  if (!(c.v_t > 0.0)) throw InvalidConfig("v_t: must be positive");
  if (!(c.dt > 0.0)) throw InvalidConfig("dt: must be positive");
  if (!(c.t_go_min > 0.0)) throw InvalidConfig("t_go_min: must be positive");
  try {
    c.validate();
  } catch (const InvalidConfig& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
}

}  // namespace detail

/// Flat `key = value` text; '#' starts a comment. Empty input gives the defaults.
inline ScenarioConfig parse_config_text(std::string_view text, std::string_view source = "<config>") {
  ScenarioConfig c;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = std::string(source) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw InvalidConfig(where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw InvalidConfig(where + ": missing key");
    if (auto [it, fresh] = seen.emplace(std::string(key), line_no); !fresh) {
      throw InvalidConfig(where + ": duplicate key '" + std::string(key) + "' (first on line " +
                          std::to_string(it->second) + ")");
    }
    try {
      set_config_value(c, key, value);
    } catch (const InvalidConfig& e) {
      throw InvalidConfig(where + ": " + e.what());
    }
  }
  detail::validate_with_keys(c);
  return c;
}

inline ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

/// Parameters a sweep may vary.
inline constexpr std::string_view kSweepParams[] = {"alpha", "v_t", "a_t", "theta_t0", "r_max", "fov"};

struct SweepSpec {
  std::string param;
  std::vector<double> values;
  bool parallel = false;

  void validate() const {
    bool known = false;
    for (auto name : kSweepParams) known = known || name == param;
    if (!known) throw InvalidConfig("sweep: unknown parameter '" + param + "'");
    if (values.empty()) throw InvalidConfig("sweep: empty value list");
  }
};

/// Comma-separated values, each accepting the same syntax as config numbers.
inline std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = detail::trim(text.substr(pos, comma == text.npos ? text.npos : comma - pos));
    if (item.empty()) {
      if (comma == text.npos && !out.empty() && pos == text.size()) break;  // trailing comma
      throw InvalidConfig("values: empty entry in '" + std::string(text) + "'");
    }
    out.push_back(parse_number(item, "values"));
    if (comma == text.npos) break;
    pos = comma + 1;
  }
  return out;
}

inline ScenarioConfig with_sweep_value(ScenarioConfig c, const std::string& param, double value) {
  if (param == "theta_t0") {
    c.target.theta = value;
  } else {
    std::ostringstream os;
    os.precision(17);
    os << value;
    set_config_value(c, param, os.str());
  }
  detail::validate_with_keys(c);
  return c;
}

}  // namespace turret_guidance
