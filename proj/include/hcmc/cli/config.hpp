#pragma once

// Experiment configuration: a YAML document with the sections domain,
// problem, mesh, solver, checks and output (grammar in docs/config.md).

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/analysis.hpp"
#include "hcmc/geometry.hpp"
#include "hcmc/solver.hpp"

namespace hcmc::cli {

/// Parse or validation failure; the message starts with "file:line:column: ".
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum Format : unsigned { csv = 1u, json = 2u, svg = 4u };

/// "csv,json,svg" (any non-empty subset) to a Format mask.
unsigned parse_formats(std::string_view list);

struct DomainConfig {
  DomainKind kind = DomainKind::disc;
  std::vector<double> params;       // disc {R}, ellipse {p, q}
  std::vector<double> radii;        // disc radii; more than one for sweeps
  Vec2 center = Vec2::Zero();
  std::filesystem::path points_file; // curve domains

  /// Disc radius to use when `radius` is positive, otherwise the configured shape.
  DomainSpec build(double radius = 0.0) const;
};

struct ExperimentConfig {
  DomainConfig domain;
  std::vector<double> H;
  double a = 1.0;
  std::vector<double> h;
  SolverConfig solver;
  VerifyOptions verify;
  std::filesystem::path out_dir = "out";
  unsigned formats = csv | json;
};

ExperimentConfig parse_config(std::string_view text, std::string_view source_name = "<config>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& file);

} // namespace hcmc::cli
