// Command-line front end: single engagements and one-parameter sweeps.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "turret_guidance/runner.hpp"
#include "turret_guidance/scenario.hpp"

#ifndef TURRET_GUIDANCE_VERSION
#define TURRET_GUIDANCE_VERSION "0.0.0"
#endif

namespace tg = turret_guidance;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, bool no_plots) {
  tg::ScenarioConfig config;
  try {
    config = tg::parse_config(config_path);
  } catch (const tg::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tg::kExitConfigError;
  }
  const auto outcome = tg::run_single(config, out_dir, !no_plots);
  if (outcome.exit_code != tg::kExitOk) {
    std::cerr << outcome.message << '\n';
    return outcome.exit_code;
  }
  std::cout << outcome.message << '\n';
  return tg::kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& values,
              bool parallel, const std::string& out_dir) {
  tg::ScenarioConfig config;
  tg::SweepSpec spec;
  try {
    config = tg::parse_config(config_path);
    spec.param = param;
    spec.values = tg::parse_value_list(values);
    spec.parallel = parallel;
    spec.validate();
  } catch (const tg::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tg::kExitConfigError;
  }
  std::vector<tg::SummaryRow> rows;
  try {
    rows = tg::run_sweep(config, spec, std::filesystem::path(out_dir));
  } catch (const tg::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tg::kExitConfigError;
  }
  tg::write_summary_csv(std::cout, rows);
  return tg::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative pursuer/turret guidance: engagement runs and parameter sweeps"};
  app.set_version_flag("--version", std::string("turret-guidance ") + TURRET_GUIDANCE_VERSION);
  app.require_subcommand(1);

  std::string run_config;
  std::string run_out = "out";
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "Simulate one engagement");
  run->add_option("config", run_config, "Scenario file (key = value)")->required();
  run->add_option("--out", run_out, "Output directory")->capture_default_str();
  run->add_flag("--no-plots", no_plots, "Write the trajectory CSV only");

  std::string sweep_config;
  std::string param;
  std::string values;
  bool parallel = false;
  std::string sweep_out = "sweep_out";
  auto* sweep = app.add_subcommand("sweep", "Run one engagement per parameter value");
  sweep->add_option("config", sweep_config, "Scenario file (key = value)")->required();
  sweep->add_option("--param", param, "alpha, v_t, a_t, theta_t0, r_max or fov")->required();
  sweep->add_option("--values", values, "Comma-separated values, e.g. 0.001,0.5,0.999")->required();
  sweep->add_flag("--parallel", parallel, "Run the engagements concurrently");
  sweep->add_option("--out", sweep_out, "Directory for summary.csv and runs/")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tg::kExitConfigError;
  }

  if (run->parsed()) return cmd_run(run_config, run_out, no_plots);
  return cmd_sweep(sweep_config, param, values, parallel, sweep_out);
}
