#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "turret_guidance/nonlinear_sim.hpp"
#include "turret_guidance/report.hpp"
#include "turret_guidance/scenario.hpp"
#include "turret_guidance/svg_plot.hpp"

namespace turret_guidance {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitNoClosure = 2,
  kExitRunaway = 3,
  kExitNumericFailure = 4,
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::optional<EngagementResult> result;
  std::string message;  ///< verdict line on success, error text otherwise
};

/// Runs one engagement and maps failures onto exit codes. Never throws for
/// engagement-level errors.
inline RunOutcome simulate(const ScenarioConfig& config) {
  RunOutcome out;
  try {
    const auto params = config.params();
    out.result = run_engagement(config.initial(), params);
    out.message = verdict_line(*out.result);
  } catch (const InvalidConfig& e) {
    out.exit_code = kExitConfigError;
    out.message = e.what();
  } catch (const NoClosureError& e) {
    out.exit_code = kExitNoClosure;
    out.message = std::string("no closure: ") + e.what();
  } catch (const RunawayEngagement& e) {
    out.exit_code = kExitRunaway;
    out.message = std::string("runaway: ") + e.what();
  } catch (const std::exception& e) {
    out.exit_code = kExitNumericFailure;
    out.message = std::string("numeric failure: ") + e.what();
  }
  return out;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

inline std::string trajectory_csv_text(const TrajectoryLog& log) {
  std::ostringstream os;
  write_trajectory_csv(os, log);
  return os.str();
}

}  // namespace detail

/// Writes trajectory.csv (and, with plots, trajectory.svg / commands.svg /
/// errors.svg) into out_dir.
inline RunOutcome run_single(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                             bool plots = true) {
  RunOutcome out = simulate(config);
  if (!out.result) return out;
  std::filesystem::create_directories(out_dir);
  const auto& log = out.result->log;
  detail::write_text(out_dir / "trajectory.csv", detail::trajectory_csv_text(log));
  if (plots) {
    detail::write_text(out_dir / "trajectory.svg", svg::trajectory_plot(log, config.r_max));
    detail::write_text(out_dir / "commands.svg", svg::command_plot(log));
    detail::write_text(out_dir / "errors.svg", svg::normalized_error_plot(log, config.r_max, config.fov));
  }
  return out;
}

inline std::string sweep_run_name(const std::string& param, std::size_t index) {
  return param + "_" + std::to_string(index) + ".csv";
}

/// One engagement per value. Per-run trajectories go to out_dir/runs/ when
/// out_dir is given; rows come back in value order whether or not the runs
/// were executed concurrently.
inline std::vector<SummaryRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                                         const std::optional<std::filesystem::path>& out_dir = {}) {
  spec.validate();
  // Build every config up front so a bad value fails the whole sweep before any run.
  std::vector<ScenarioConfig> configs;
  configs.reserve(spec.values.size());
  for (double v : spec.values) configs.push_back(with_sweep_value(base, spec.param, v));

  const auto one = [&](std::size_t i) {
    const auto outcome = simulate(configs[i]);
    SummaryRow row;
    if (outcome.result) {
      row = summarize(spec.values[i], *outcome.result);
      if (out_dir) {
        detail::write_text(*out_dir / "runs" / sweep_run_name(spec.param, i),
                           detail::trajectory_csv_text(outcome.result->log));
      }
    } else {
      row.value = spec.values[i];
      row.error = outcome.message;
    }
    return row;
  };

  if (out_dir) std::filesystem::create_directories(*out_dir / "runs");
  std::vector<SummaryRow> rows(spec.values.size());
  if (spec.parallel) {
    std::vector<std::future<SummaryRow>> jobs;
    jobs.reserve(spec.values.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) jobs.push_back(std::async(std::launch::async, one, i));
    for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < spec.values.size(); ++i) rows[i] = one(i);
  }
  if (out_dir) {
    std::ostringstream os;
    write_summary_csv(os, rows);
    detail::write_text(*out_dir / "summary.csv", os.str());
  }
  return rows;
}

}  // namespace turret_guidance
