#include "hcmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "hcmc/closed_form.hpp"

namespace hcmc {

std::string_view to_string(InitialGuess guess) {
  return guess == InitialGuess::radial_cap ? "radial-cap" : "boundary-constant";
}

InitialGuess initial_guess_from_string(std::string_view name) {
  if (name == "boundary-constant")
    return InitialGuess::boundary_constant;
  if (name == "radial-cap")
    return InitialGuess::radial_cap;
  throw std::invalid_argument("unknown initial guess '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (!(newton_tol > 0.0))
    throw std::invalid_argument("newton_tol must be positive");
  if (max_newton_iters < 1)
    throw std::invalid_argument("max_newton_iters must be at least 1");
  if (continuation_steps < 1)
    throw std::invalid_argument("continuation_steps must be at least 1");
  if (!(damping > 0.0 && damping < 1.0))
    throw std::invalid_argument("damping must lie in (0, 1)");
  if (!(min_step > 0.0 && min_step <= 1.0))
    throw std::invalid_argument("min_step must lie in (0, 1]");
}

double SolutionField::max_value() const { return *std::max_element(u.begin(), u.end()); }

namespace {

struct Element {
  double area;
  std::array<Vec2, 3> grad; // gradients of the barycentric coordinates
};

Element element(const Mesh& mesh, const Triangle& t) {
  const double area = mesh.signed_area(t);
  Element e{area, {}};
  for (int k = 0; k < 3; ++k) {
    const Vec2& p = mesh.vertices[t[(k + 1) % 3]];
    const Vec2& q = mesh.vertices[t[(k + 2) % 3]];
    e.grad[k] = Vec2(p.y() - q.y(), q.x() - p.x()) / (2.0 * area);
  }
  return e;
}

Vec2 element_gradient(const Element& e, const Triangle& t, std::span<const double> u) {
  return u[t[0]] * e.grad[0] + u[t[1]] * e.grad[1] + u[t[2]] * e.grad[2];
}

void require_positive(std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0)) {
      std::ostringstream msg;
      msg << "u must be positive; u[" << i << "] = " << u[i];
      throw std::domain_error(msg.str());
    }
}

void require_size(const Mesh& mesh, std::span<const double> u) {
  if (u.size() != mesh.vertex_count())
    throw std::invalid_argument("field size does not match the mesh");
}

} // namespace

Eigen::VectorXd residual(const Mesh& mesh, std::span<const double> u, double H, double a) {
  require_size(mesh, u);
  require_positive(u);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(u.size()));
  for (const Triangle& t : mesh.triangles) {
    const Element e = element(mesh, t);
    const Vec2 G = element_gradient(e, t, u);
    const double W = std::sqrt(1.0 + G.squaredNorm());
    const double uc = (u[t[0]] + u[t[1]] + u[t[2]]) / 3.0;
    const double source = (2.0 / uc) * (1.0 / W - H);
    for (int k = 0; k < 3; ++k)
      F[t[k]] += e.area * (G.dot(e.grad[k]) / W - source / 3.0);
  }
  for (std::size_t i = 0; i < u.size(); ++i)
    if (mesh.boundary[i])
      F[static_cast<Eigen::Index>(i)] = u[i] - a;
  return F;
}

double residual_norm(const Eigen::VectorXd& r) {
  return r.size() == 0 ? 0.0 : r.norm() / std::sqrt(static_cast<double>(r.size()));
}

Eigen::SparseMatrix<double> jacobian(const Mesh& mesh, std::span<const double> u, double H,
                                     unsigned terms) {
  require_size(mesh, u);
  require_positive(u);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * mesh.triangles.size() + mesh.vertex_count());
  for (const Triangle& t : mesh.triangles) {
    const Element e = element(mesh, t);
    const Vec2 G = element_gradient(e, t, u);
    const double W = std::sqrt(1.0 + G.squaredNorm());
    const double W3 = W * W * W;
    const double uc = (u[t[0]] + u[t[1]] + u[t[2]]) / 3.0;
    for (int i = 0; i < 3; ++i) {
      if (mesh.boundary[t[i]])
        continue;
      const double Gi = G.dot(e.grad[i]);
      for (int j = 0; j < 3; ++j) {
        const double Gj = G.dot(e.grad[j]);
        double value = 0.0;
        if (terms & principal)
          value += e.area * (e.grad[i].dot(e.grad[j]) / W - Gi * Gj / W3);
        if (terms & slope_coupling)
          value += e.area / 3.0 * (2.0 / (uc * W3)) * Gj;
        if (terms & reaction)
          value += e.area / 3.0 * (2.0 / (3.0 * uc * uc)) * (1.0 / W - H);
        entries.emplace_back(t[i], t[j], value);
      }
    }
  }
  if (terms & principal)
    for (std::size_t i = 0; i < u.size(); ++i)
      if (mesh.boundary[i])
        entries.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(entries.begin(), entries.end());
  return J;
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::string reason;
};

NewtonOutcome newton(const Mesh& mesh, std::vector<double>& u, double H, double a,
                     const SolverConfig& cfg) {
  NewtonOutcome out;
  Eigen::VectorXd F = residual(mesh, u, H, a);
  double norm = residual_norm(F);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analysed = false;
  std::vector<double> trial(u.size());
  while (norm > cfg.newton_tol) {
    if (out.iterations >= cfg.max_newton_iters) {
      out.reason = "Newton iteration limit reached";
      out.residual = norm;
      return out;
    }
    const Eigen::SparseMatrix<double> J = jacobian(mesh, u, H);
    if (!analysed) {
      lu.analyzePattern(J);
      analysed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) {
      out.reason = "singular Jacobian";
      out.residual = norm;
      return out;
    }
    const Eigen::VectorXd step = lu.solve(-F);

    bool accepted = false;
    for (double lambda = 1.0; lambda >= cfg.min_step; lambda *= cfg.damping) {
      bool admissible = true;
      for (std::size_t i = 0; i < u.size(); ++i) {
        trial[i] = u[i] + lambda * step[static_cast<Eigen::Index>(i)];
        if (!(trial[i] > 0.5 * a))
          admissible = false;
      }
      if (!admissible)
        continue;
      Eigen::VectorXd Ft = residual(mesh, trial, H, a);
      const double trial_norm = residual_norm(Ft);
      if (trial_norm < (1.0 - 1e-4 * lambda) * norm) {
        u.swap(trial);
        F = std::move(Ft);
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    if (!accepted) {
      out.reason = "line search failed";
      out.residual = norm;
      return out;
    }
  }
  out.converged = true;
  out.residual = norm;
  return out;
}

} // namespace

int newton_solve(const Mesh& mesh, std::vector<double>& u, double H, double a,
                 const SolverConfig& cfg) {
  cfg.validate();
  const NewtonOutcome outcome = newton(mesh, u, H, a, cfg);
  if (!outcome.converged) {
    SolutionField last{nullptr, u, H, a, {}};
    last.diagnostics.newton_iterations = outcome.iterations;
    last.diagnostics.residual_norm = outcome.residual;
    throw SolveFailure(outcome.reason, std::move(last));
  }
  return outcome.iterations;
}

SolutionField solve_dirichlet(std::shared_ptr<const Mesh> mesh, const DomainSpec& domain,
                              double H, double a, const SolverConfig& cfg) {
  cfg.validate();
  if (!mesh)
    throw std::invalid_argument("solve_dirichlet needs a mesh");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("boundary height a must be positive");
  if (!(H <= 1.0) || !std::isfinite(H))
    throw std::invalid_argument("mean curvature H must satisfy H <= 1");

  SolutionField field{mesh, std::vector<double>(mesh->vertex_count(), a), H, a, {}};
  SolveDiagnostics& diag = field.diagnostics;

  const double initial = residual_norm(residual(*mesh, field.u, H, a));
  if (initial <= cfg.newton_tol) {
    diag.converged = true;
    diag.tau_reached = 1.0;
    diag.residual_norm = initial;
    return field;
  }

  if (cfg.initial_guess == InitialGuess::radial_cap && H < 1.0) {
    try {
      const Circle disc = circumcircle(domain);
      const RadialCap cap = radial_cap(H, disc.radius, a);
      std::vector<double> u(field.u.size(), a);
      for (std::size_t i = 0; i < u.size(); ++i)
        if (!mesh->boundary[i])
          u[i] = cap.height(std::min((mesh->vertices[i] - disc.center).norm(), disc.radius));
      const NewtonOutcome direct = newton(*mesh, u, H, a, cfg);
      if (direct.converged) {
        field.u = std::move(u);
        diag.converged = true;
        diag.newton_iterations = direct.iterations;
        diag.stage_iterations = {direct.iterations};
        diag.continuation_steps = 1;
        diag.tau_reached = 1.0;
        diag.residual_norm = direct.residual;
        return field;
      }
      diag.newton_iterations += direct.iterations;
    } catch (const BoundUndefined&) {
      // No cap over the circumscribed disc; use the continuation path.
    }
  }

  const int steps = cfg.continuation_steps;
  std::vector<double> u = field.u;
  for (int k = 0; k <= steps; ++k) {
    const double tau = static_cast<double>(k) / steps;
    std::vector<double> stage = u;
    const NewtonOutcome outcome = newton(*mesh, stage, tau * H, a, cfg);
    diag.newton_iterations += outcome.iterations;
    diag.stage_iterations.push_back(outcome.iterations);
    diag.residual_norm = outcome.residual;
    if (!outcome.converged) {
      field.u = std::move(stage);
      std::ostringstream msg;
      msg << "no solution found: " << outcome.reason << " at tau = " << tau
          << " (H = " << tau * H << "); last converged tau = " << diag.tau_reached;
      throw SolveFailure(msg.str(), std::move(field));
    }
    u = std::move(stage);
    diag.tau_reached = tau;
  }
  field.u = std::move(u);
  diag.converged = true;
  diag.continuation_steps = steps;
  return field;
}

SolutionField solve_dirichlet(const DomainSpec& domain, double H, double a, double h,
                              const SolverConfig& cfg) {
  auto mesh = std::make_shared<const Mesh>(triangulate(domain, h));
  return solve_dirichlet(std::move(mesh), domain, H, a, cfg);
}

GradientField gradient_field(const Mesh& mesh, std::span<const double> u) {
  require_size(mesh, u);
  GradientField g;
  g.per_triangle.reserve(mesh.triangles.size());
  g.per_vertex.assign(mesh.vertex_count(), Vec2::Zero());
  std::vector<double> weight(mesh.vertex_count(), 0.0);
  for (const Triangle& t : mesh.triangles) {
    const Element e = element(mesh, t);
    const Vec2 G = element_gradient(e, t, u);
    g.per_triangle.push_back(G);
    for (int v : t) {
      g.per_vertex[v] += e.area * G;
      weight[v] += e.area;
    }
  }
  g.magnitude.resize(mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (weight[v] > 0.0)
      g.per_vertex[v] /= weight[v];
    g.magnitude[v] = g.per_vertex[v].norm();
  }
  return g;
}

GradientField gradient_field(const SolutionField& s) { return gradient_field(*s.mesh, s.u); }

std::vector<double> recovered_mean_curvature(const SolutionField& s) {
  const Mesh& mesh = *s.mesh;
  std::vector<double> flux(mesh.vertex_count(), 0.0), mass(mesh.vertex_count(), 0.0);
  for (const Triangle& t : mesh.triangles) {
    const Element e = element(mesh, t);
    const Vec2 G = element_gradient(e, t, s.u);
    const double W = std::sqrt(1.0 + G.squaredNorm());
    for (int k = 0; k < 3; ++k) {
      flux[t[k]] += e.area * G.dot(e.grad[k]) / W;
      mass[t[k]] += e.area / 3.0;
    }
  }
  const GradientField g = gradient_field(s);
  std::vector<double> H(mesh.vertex_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.boundary[v])
      continue;
    const double div = -flux[v] / mass[v];
    const double W = std::sqrt(1.0 + g.magnitude[v] * g.magnitude[v]);
    H[v] = 1.0 / W + 0.5 * s.u[v] * div;
  }
  return H;
}

} // namespace hcmc
