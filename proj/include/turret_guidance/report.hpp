#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "turret_guidance/nonlinear_sim.hpp"

namespace turret_guidance {

inline constexpr std::array<std::string_view, 22> kTrajectoryColumns = {
    "t",     "x_p",      "y_p",        "theta_p", "psi", "omega", "x_t",  "y_t",
    "theta_t", "r",      "gamma",      "gamma_dot", "t_go", "z_d", "z_psi", "c_d_star",
    "c_psi_star", "u1",  "u2",         "a_p",     "tau", "j_running"};

inline constexpr std::array<std::string_view, 8> kSummaryColumns = {
    "value", "captured", "t_end", "r_end", "pointing_err_end", "total_cost", "peak_u1", "peak_u2"};

/// 17 significant digits, enough for an exact round trip.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

inline std::array<double, 22> trajectory_row(const LogSample& s) {
  const auto& st = s.state;
  return {st.t,         st.pursuer.x, st.pursuer.y, st.pursuer.theta, st.psi,       st.omega,
          st.target.x,  st.target.y,  st.target.theta, s.r,          s.gamma,      s.gamma_dot,
          s.t_go,       s.z_d,        s.z_psi,      s.c_d_star,       s.c_psi_star, s.u1,
          s.u2,         s.a_p,        s.tau,        s.j_running};
}

template <std::size_t N>
void write_csv_line(std::ostream& out, const std::array<std::string_view, N>& cells) {
  for (std::size_t i = 0; i < N; ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

inline void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  write_csv_line(out, kTrajectoryColumns);
  for (const auto& s : log.samples) {
    const auto row = trajectory_row(s);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

/// Reads a trajectory CSV back into numeric rows, checking the header.
inline std::vector<std::array<double, 22>> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidConfig("trajectory csv: missing header");
  {
    std::ostringstream expect;
    write_csv_line(expect, kTrajectoryColumns);
    std::string header = expect.str();
    header.pop_back();
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw InvalidConfig("trajectory csv: unexpected header '" + line + "'");
  }
  std::vector<std::array<double, 22>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 22> row{};
    std::size_t col = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end && col < row.size()) {
      const char* comma = std::find(p, end, ',');
      auto [ptr, ec] = std::from_chars(p, comma, row[col]);
      if (ec != std::errc() || ptr != comma) {
        throw InvalidConfig("trajectory csv: bad number in row " + std::to_string(rows.size() + 1));
      }
      ++col;
      p = comma + 1;
    }
    if (col != row.size() || p <= end) {
      throw InvalidConfig("trajectory csv: wrong column count in row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(row);
  }
  return rows;
}

/// One line of a sweep summary. `error` is set instead of the numbers when
/// the run failed hard.
struct SummaryRow {
  double value = 0.0;
  bool captured = false;
  double t_end = 0.0;
  double r_end = 0.0;
  double pointing_err_end = 0.0;
  double total_cost = 0.0;
  double peak_u1 = 0.0;
  double peak_u2 = 0.0;
  std::string error;
};

inline SummaryRow summarize(double value, const EngagementResult& r) {
  return {value,      r.verdict.captured, r.verdict.t_end, r.verdict.r_end, r.verdict.pointing_err_end,
          r.total_cost, r.peak_u1,        r.peak_u2,       {}};
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  write_csv_line(out, kSummaryColumns);
  for (const auto& r : rows) {
    out << format_double(r.value) << ',';
    if (!r.error.empty()) {
      // Keep the column count; the error text goes in the captured column.
      std::string msg = r.error;
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      }
      out << "error: " << msg << ",,,,,,\n";
      continue;
    }
    out << (r.captured ? "true" : "false") << ',' << format_double(r.t_end) << ','
        << format_double(r.r_end) << ',' << format_double(r.pointing_err_end) << ','
        << format_double(r.total_cost) << ',' << format_double(r.peak_u1) << ','
        << format_double(r.peak_u2) << '\n';
  }
}

/// Human-readable verdict line for stdout.
inline std::string verdict_line(const EngagementResult& r) {
  std::ostringstream os;
  os << "captured=" << (r.verdict.captured ? "true" : "false") << " t_end=" << r.verdict.t_end
     << " r_end=" << r.verdict.r_end << " pointing_err_end=" << r.verdict.pointing_err_end
     << " normalized_range=" << r.verdict.normalized_range
     << " normalized_orientation=" << r.verdict.normalized_orientation
     << " total_cost=" << r.total_cost
     << " termination=" << (r.termination == Termination::kClosestApproach ? "closest_approach" : "t_go_guard");
  return os.str();
}

}  // namespace turret_guidance
