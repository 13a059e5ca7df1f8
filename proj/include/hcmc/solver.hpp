#pragma once

// P1 finite elements for the Dirichlet problem
//
//   div(Du / W) + (2 / u) (1 / W - H) = 0 in the domain,  u = a on the boundary,
//
// with W = sqrt(1 + |Du|^2), solved by damped Newton iteration and
// continuation in the mean curvature (tau H, tau from 0 to 1).

#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hcmc/geometry.hpp"
#include "hcmc/mesh.hpp"

namespace hcmc {

enum class InitialGuess { boundary_constant, radial_cap };

std::string_view to_string(InitialGuess guess);
InitialGuess initial_guess_from_string(std::string_view name);

struct SolverConfig {
  double newton_tol = 1e-10;
  int max_newton_iters = 50;
  int continuation_steps = 10;
  double damping = 0.5;
  double min_step = 0x1p-20;
  InitialGuess initial_guess = InitialGuess::boundary_constant;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct SolveDiagnostics {
  bool converged = false;
  int newton_iterations = 0; // total over all continuation stages
  int continuation_steps = 0;
  double tau_reached = 0.0;
  double residual_norm = 0.0;
  std::vector<int> stage_iterations;
};

struct SolutionField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> u;
  double H = 0.0;
  double a = 1.0;
  SolveDiagnostics diagnostics;

  double max_value() const;
};

/// Continuation stopped short of tau = 1. Carries the last accepted iterate.
class SolveFailure : public std::runtime_error {
public:
  SolveFailure(const std::string& what, SolutionField last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const SolutionField& last_iterate() const { return last_; }

private:
  SolutionField last_;
};

/// Nodal residual of the weak form. Interior rows hold
///   sum_T |T| [ Du.Dphi_i / W - (1/3) (2/u_T) (1/W - H) ]
/// with centroid values u_T; boundary rows hold u_i - a.
/// Throws std::domain_error when any u <= 0.
Eigen::VectorXd residual(const Mesh& mesh, std::span<const double> u, double H, double a);

/// Root-mean-square of a residual vector.
double residual_norm(const Eigen::VectorXd& r);

/// Jacobian pieces, for inspection. The principal part is the linearised
/// flux, slope coupling the gradient dependence of the lower-order term,
/// reaction its dependence on u (derivative of the residual, i.e. of -Q).
enum JacobianTerms : unsigned {
  principal = 1u,
  slope_coupling = 2u,
  reaction = 4u,
  all_terms = 7u,
};

/// Derivative of residual() with respect to u. Boundary rows are identity
/// rows when the principal part is requested and empty otherwise.
Eigen::SparseMatrix<double> jacobian(const Mesh& mesh, std::span<const double> u, double H,
                                     unsigned terms = all_terms);

/// Newton solve at a single value of H starting from `u` (modified in
/// place). Returns the number of iterations; throws SolveFailure.
int newton_solve(const Mesh& mesh, std::vector<double>& u, double H, double a,
                 const SolverConfig& cfg);

SolutionField solve_dirichlet(std::shared_ptr<const Mesh> mesh, const DomainSpec& domain,
                              double H, double a, const SolverConfig& cfg = {});

SolutionField solve_dirichlet(const DomainSpec& domain, double H, double a, double h,
                              const SolverConfig& cfg = {});

struct GradientField {
  std::vector<Vec2> per_triangle;
  std::vector<Vec2> per_vertex; // area-weighted average of adjacent triangles
  std::vector<double> magnitude; // |per_vertex|
};

GradientField gradient_field(const Mesh& mesh, std::span<const double> u);
GradientField gradient_field(const SolutionField& s);

/// Per-vertex 1/W + (u/2) div(Du/W) using the lumped discrete divergence;
/// approximates H at interior vertices.
std::vector<double> recovered_mean_curvature(const SolutionField& s);

} // namespace hcmc
