#pragma once

#include <string>

#include <json.hpp>

namespace itwlab::experiments {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutcome {
  nlohmann::json config;  // full echo, defaults included
  nlohmann::json result;  // results + criteria, no timing data
  bool criteria_pass = true;
};

// Runs one experiment described by a config JSON (no artifact writing).
RunOutcome run_experiment(const nlohmann::json& config);

// Reads a config file, runs it, writes artifacts into the output directory
// (config value, overridable), returns the process exit code:
// 0 pass, 1 criteria failed, 2 config/setup error.
int run_config_file(const std::string& path, const std::string& outdir_override = "");

nlohmann::json catalog_json();

// Reduced end-to-end smoke checks; returns a report with per-check lines.
nlohmann::json quick_verify(int workers);

// Variance constant of the moving-average representation:
// c_H = 1/(2H) + int_0^inf ((1+v)^(H-1/2) - v^(H-1/2))^2 dv, optionally
// truncated at the lattice's left horizon.
double fbm_variance_constant(double hurst, double left_horizon = -1.0);

}  // namespace itwlab::experiments
