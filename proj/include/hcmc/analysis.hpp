#pragma once

// Qualitative checks on discrete solutions: the Phi-function, critical
// points, nodal sets of directional derivatives, boundary behaviour, and the
// aggregated theorem report.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/geometry.hpp"
#include "hcmc/solver.hpp"

namespace hcmc {

/// The field is (numerically) constant, so the requested structure is undefined.
class DegenerateField : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The solution violates 1 - H sqrt(1 + q^2) > 0 on too many vertices.
class OutOfScope : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Phi-function

/// Phi(x; alpha) = log((1 + q^2) / (1 - H sqrt(1 + q^2))^2 * u^(2 alpha)), q = |Du|.
struct PhiField {
  double alpha = 0.0;
  double H = 0.0;
  double a = 1.0;
  std::vector<double> values;
  std::vector<double> rho;   // 1 - H sqrt(1 + q^2) per vertex
  std::vector<int> flagged;  // rho below -rho_slack (NaN value when rho == 0)
};

/// Throws OutOfScope when more than 1% of the vertices are flagged.
PhiField phi(const SolutionField& s, double alpha, double rho_slack);

/// Closed form at a critical point (q = 0): log(u^(2 alpha) / (1 - H)^2).
double phi_at_critical_point(double u, double H, double alpha);

// Critical points

struct CriticalPoint {
  Vec2 position = Vec2::Zero();
  double u = 0.0;
  double grad = 0.0; // recovered |Du| at the detecting vertex
  int vertex = -1;
};

struct CriticalPointSet {
  std::vector<CriticalPoint> points;
  bool degenerate = false; // |Du| below tolerance everywhere

  std::size_t count() const { return points.size(); }
};

/// Interior local minima of the recovered |Du| that are below `tol`, each
/// refined to the stationary point of a least-squares quadratic fitted on
/// the vertex star. Minima closer than h are merged.
CriticalPointSet find_critical_points(const Mesh& mesh, std::span<const double> u, double tol);
CriticalPointSet find_critical_points(const SolutionField& s, double tol);

// Nodal sets

/// v(theta) = Du . (cos theta, sin theta) at the vertices.
std::vector<double> directional_derivative(const SolutionField& s, double theta);

struct NodalSummary {
  double theta = 0.0;
  int boundary_zero_count = 0;
  int component_count = 0;
};

/// Throws DegenerateField when v(theta) vanishes identically.
NodalSummary nodal_summary(const SolutionField& s, double theta);

// Boundary normal identity

struct BoundaryNormalSample {
  int vertex = -1;
  double kappa = 0.0;
  double u_n = 0.0;  // outward normal derivative
  double u_nn = 0.0;
  double residual = 0.0;
};

/// Residual of u_nn / W^3 + kappa u_n / W + (2/u)(1/W - H), W = sqrt(1 + u_n^2),
/// at every boundary vertex; derivatives from a one-sided quadratic fit.
std::vector<BoundaryNormalSample> boundary_normal_residual(const SolutionField& s,
                                                           const DomainSpec& domain);

// Theorem report

enum class CheckId {
  boundary_gradient_max,
  gradient_estimate,
  height_lower_bound,
  height_upper_bound,
  min_principle,
  nodal_structure,
  phi_max_alpha2,
  phi_min_boundary,
  tilt_bound,
  unique_critical_point,
};

inline constexpr CheckId all_checks[] = {
    CheckId::boundary_gradient_max, CheckId::gradient_estimate, CheckId::height_lower_bound,
    CheckId::height_upper_bound,    CheckId::min_principle,     CheckId::nodal_structure,
    CheckId::phi_max_alpha2,        CheckId::phi_min_boundary,  CheckId::tilt_bound,
    CheckId::unique_critical_point,
};

std::string_view to_string(CheckId id);
CheckId check_id_from_string(std::string_view name);

enum class CheckStatus { pass, fail, not_applicable };
std::string_view to_string(CheckStatus status);

struct TheoremReport {
  CheckId id = CheckId::gradient_estimate;
  CheckStatus status = CheckStatus::not_applicable;
  std::optional<double> margin; // signed slack in natural units
  std::string details;
};

/// Discretisation slack per check, slack = c h (min_principle: c h^2 a).
/// The defaults are the frozen calibration on radial-cap baselines.
struct SlackConstants {
  double gradient = 1.0;
  double tilt = 1.0;
  double boundary_gradient = 0.5;
  double phi_min = 0.5;
  double phi_constant = 3.0;
  double height = 0.5;
  double min_principle = 10.0;
  double rho = 1.0;
};

struct VerifyOptions {
  SlackConstants slack;
  double critical_tol_fraction = 0.25; // of max |Du|
  int nodal_directions = 8;
  std::vector<CheckId> checks; // empty: all
};

/// Runs every requested check; the result is sorted by check name.
std::vector<TheoremReport> verify_all(const SolutionField& s, const DomainSpec& domain,
                                      const VerifyOptions& options = {});

} // namespace hcmc
