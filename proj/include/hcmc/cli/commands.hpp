#pragma once

// Subcommands of the hcmc tool. Each returns a process exit code.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcmc/cli/config.hpp"

namespace hcmc::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_other = 1,          // I/O and other runtime errors
  exit_nonconvergence = 2, // solver did not reach tau = 1
  exit_check_failure = 3,  // an applicable check failed
  exit_config_error = 4,   // unreadable or invalid configuration
};

/// Command-line overrides of the configuration.
struct Overrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<unsigned> formats;
  std::optional<double> h;
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const Overrides& overrides);

int run_solve(const ExperimentConfig& cfg, std::ostream& log);
int run_verify(const ExperimentConfig& cfg, std::ostream& log);

struct SweepRow {
  double H = 0.0;
  double R = 0.0; // disc radius, or circumradius for other shapes
  double h = 0.0;
  bool converged = false;
  int newton_iterations = 0;
  double u_max = 0.0;
  double max_grad = 0.0;
  std::optional<double> window_R2;
  std::optional<bool> inside_window; // (R / a)^2 <= window_R2
  std::optional<double> gradient_bound;
  double tilt_bound = 0.0;
  double height_lower = 0.0;
  std::optional<double> height_upper;
  std::vector<std::string> failed_checks;
  std::string error;
};

/// One row per (H, R, h) in input order (H outermost). Rows are computed on
/// up to `threads` worker threads and never abort the sweep.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, int threads);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows);

int run_sweep(const ExperimentConfig& cfg, int threads, std::ostream& log);

struct PlotRequest {
  std::filesystem::path input;
  std::string column = "u";
  std::vector<double> levels; // empty: auto_levels equispaced levels
  int auto_levels = 12;
  std::optional<std::filesystem::path> output; // file or directory
};

int run_plot(const PlotRequest& request, std::ostream& log);

/// Closed-form cap over the disc of radius R and every bound evaluated on it.
nlohmann::json radial_summary(double H, double R, double a);
int run_radial(double H, double R, double a, bool as_json, std::ostream& out);

/// Runs `body`, mapping exceptions to exit codes and messages on `log`.
int guarded(const std::function<int()>& body, std::ostream& log);

} // namespace hcmc::cli
