#include "hcmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "hcmc/closed_form.hpp"
#include "hcmc/contour.hpp"

namespace hcmc {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// u ~ c0 + c1 x + c2 y + c3 x^2 + c4 x y + c5 y^2 in coordinates (p - origin) / scale.
struct QuadraticFit {
  Vec2 origin;
  double scale;
  Eigen::Matrix<double, 6, 1> c;

  double value(const Vec2& p) const {
    const Vec2 x = (p - origin) / scale;
    return c[0] + c[1] * x.x() + c[2] * x.y() + c[3] * x.x() * x.x() + c[4] * x.x() * x.y() +
           c[5] * x.y() * x.y();
  }
  Vec2 gradient(const Vec2& p) const {
    const Vec2 x = (p - origin) / scale;
    return Vec2(c[1] + 2 * c[3] * x.x() + c[4] * x.y(), c[2] + c[4] * x.x() + 2 * c[5] * x.y()) /
           scale;
  }
  Eigen::Matrix2d hessian() const {
    Eigen::Matrix2d M;
    M << 2 * c[3], c[4], c[4], 2 * c[5];
    return M / (scale * scale);
  }
};

std::optional<QuadraticFit> fit_quadratic(const Mesh& mesh, std::span<const double> u,
                                          std::span<const int> stencil, const Vec2& origin) {
  if (stencil.size() < 6)
    return std::nullopt;
  const double scale = mesh.h > 0.0 ? mesh.h : 1.0;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(stencil.size()), 6);
  Eigen::VectorXd b(static_cast<Eigen::Index>(stencil.size()));
  for (std::size_t r = 0; r < stencil.size(); ++r) {
    const Vec2 x = (mesh.vertices[stencil[r]] - origin) / scale;
    const auto i = static_cast<Eigen::Index>(r);
    A.row(i) << 1.0, x.x(), x.y(), x.x() * x.x(), x.x() * x.y(), x.y() * x.y();
    b[i] = u[stencil[r]];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 6)
    return std::nullopt;
  return QuadraticFit{origin, scale, qr.solve(b)};
}

// Vertices within `rings` edges of v, v first.
std::vector<int> ring_stencil(const std::vector<std::vector<int>>& adj, int v, int rings) {
  std::vector<int> out{v};
  std::size_t begin = 0;
  for (int r = 0; r < rings; ++r) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int w : adj[out[i]])
        if (std::find(out.begin(), out.end(), w) == out.end())
          out.push_back(w);
    begin = end;
  }
  return out;
}

int argmax_vertex(std::span<const double> values, const Mesh& mesh, bool boundary_only,
                  bool interior_only) {
  int best = -1;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if ((boundary_only && !mesh.boundary[v]) || (interior_only && mesh.boundary[v]))
      continue;
    if (std::isnan(values[v]))
      continue;
    if (best < 0 || values[v] > values[best])
      best = static_cast<int>(v);
  }
  return best;
}

} // namespace

PhiField phi(const SolutionField& s, double alpha, double rho_slack) {
  const GradientField g = gradient_field(s);
  PhiField out{alpha, s.H, s.a, {}, {}, {}};
  const std::size_t n = s.u.size();
  out.values.resize(n);
  out.rho.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const double q2 = g.magnitude[v] * g.magnitude[v];
    const double rho = 1.0 - s.H * std::sqrt(1.0 + q2);
    out.rho[v] = rho;
    out.values[v] = rho == 0.0 ? nan
                               : std::log1p(q2) - std::log(rho * rho) +
                                     2.0 * alpha * std::log(s.u[v]);
    if (rho == 0.0 || rho < -rho_slack)
      out.flagged.push_back(static_cast<int>(v));
  }
  if (static_cast<double>(out.flagged.size()) > 0.01 * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << out.flagged.size() << " of " << n
        << " vertices violate 1 - H sqrt(1 + |Du|^2) > 0 beyond the slack";
    throw OutOfScope(msg.str());
  }
  return out;
}

double phi_at_critical_point(double u, double H, double alpha) {
  return 2.0 * alpha * std::log(u) - 2.0 * std::log(1.0 - H);
}

CriticalPointSet find_critical_points(const Mesh& mesh, std::span<const double> u, double tol) {
  const GradientField g = gradient_field(mesh, u);
  CriticalPointSet out;
  const double largest = *std::max_element(g.magnitude.begin(), g.magnitude.end());
  if (largest <= tol) {
    out.degenerate = true;
    return out;
  }
  const auto adj = mesh.vertex_neighbors();
  std::vector<CriticalPoint> found;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.boundary[v] || !(g.magnitude[v] < tol))
      continue;
    const double mv = g.magnitude[v];
    const bool local_min = std::all_of(adj[v].begin(), adj[v].end(), [&](int w) {
      return mv < g.magnitude[w] || (mv == g.magnitude[w] && static_cast<int>(v) < w);
    });
    if (!local_min)
      continue;

    const int vi = static_cast<int>(v);
    CriticalPoint cp{mesh.vertices[v], u[v], mv, vi};
    std::vector<int> stencil = ring_stencil(adj, vi, 1);
    if (stencil.size() < 7)
      stencil = ring_stencil(adj, vi, 2);
    if (const auto fit = fit_quadratic(mesh, u, stencil, mesh.vertices[v])) {
      const Eigen::Matrix2d M = fit->hessian();
      if (std::abs(M.determinant()) > 0.0) {
        const Vec2 x = mesh.vertices[v] - M.inverse() * fit->gradient(mesh.vertices[v]);
        if ((x - mesh.vertices[v]).norm() <= 2.0 * mesh.h) {
          cp.position = x;
          cp.u = fit->value(x);
        }
      }
    }
    found.push_back(cp);
  }

  std::sort(found.begin(), found.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.u > b.u; });
  for (const CriticalPoint& cp : found) {
    const bool duplicate = std::any_of(out.points.begin(), out.points.end(), [&](const auto& k) {
      return (k.position - cp.position).norm() < mesh.h;
    });
    if (!duplicate)
      out.points.push_back(cp);
  }
  return out;
}

CriticalPointSet find_critical_points(const SolutionField& s, double tol) {
  return find_critical_points(*s.mesh, s.u, tol);
}

std::vector<double> directional_derivative(const SolutionField& s, double theta) {
  const GradientField g = gradient_field(s);
  const Vec2 dir(std::cos(theta), std::sin(theta));
  std::vector<double> v(s.u.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = g.per_vertex[i].dot(dir);
  return v;
}

NodalSummary nodal_summary(const SolutionField& s, double theta) {
  const std::vector<double> v = directional_derivative(s, theta);
  double largest = 0.0;
  for (double x : v)
    largest = std::max(largest, std::abs(x));
  if (!(largest > 1e-12))
    throw DegenerateField("directional derivative vanishes identically");

  NodalSummary out{theta, 0, 0};
  const double deadband = 1e-8 * largest;
  const Mesh& mesh = *s.mesh;
  int first_sign = 0, last_sign = 0;
  for (int b : mesh.boundary_loop) {
    if (std::abs(v[b]) <= deadband)
      continue;
    const int sign = v[b] > 0.0 ? 1 : -1;
    if (first_sign == 0)
      first_sign = sign;
    else if (sign != last_sign)
      ++out.boundary_zero_count;
    last_sign = sign;
  }
  if (first_sign != 0 && last_sign != first_sign)
    ++out.boundary_zero_count;
  out.component_count = static_cast<int>(level_set(mesh, v, 0.0).size());
  return out;
}

std::vector<BoundaryNormalSample> boundary_normal_residual(const SolutionField& s,
                                                           const DomainSpec& domain) {
  const Mesh& mesh = *s.mesh;
  const auto adj = mesh.vertex_neighbors();
  std::vector<BoundaryNormalSample> out;
  out.reserve(mesh.boundary_loop.size());
  for (int b : mesh.boundary_loop) {
    const double t = mesh.boundary_param[b];
    const Vec2 normal = domain.outward_normal(t);
    BoundaryNormalSample sample{b, domain.curvature(t), 0.0, 0.0, nan};
    const std::vector<int> stencil = ring_stencil(adj, b, 3);
    if (const auto fit = fit_quadratic(mesh, s.u, stencil, mesh.vertices[b])) {
      sample.u_n = fit->gradient(mesh.vertices[b]).dot(normal);
      sample.u_nn = normal.dot(fit->hessian() * normal);
      const double W = std::sqrt(1.0 + sample.u_n * sample.u_n);
      sample.residual = sample.u_nn / (W * W * W) + sample.kappa * sample.u_n / W +
                        2.0 / s.u[b] * (1.0 / W - s.H);
    }
    out.push_back(sample);
  }
  return out;
}

std::string_view to_string(CheckId id) {
  switch (id) {
  case CheckId::boundary_gradient_max:
    return "boundary_gradient_max";
  case CheckId::gradient_estimate:
    return "gradient_estimate";
  case CheckId::height_lower_bound:
    return "height_lower_bound";
  case CheckId::height_upper_bound:
    return "height_upper_bound";
  case CheckId::min_principle:
    return "min_principle";
  case CheckId::nodal_structure:
    return "nodal_structure";
  case CheckId::phi_max_alpha2:
    return "phi_max_alpha2";
  case CheckId::phi_min_boundary:
    return "phi_min_boundary";
  case CheckId::tilt_bound:
    return "tilt_bound";
  case CheckId::unique_critical_point:
    return "unique_critical_point";
  }
  return "unknown";
}

CheckId check_id_from_string(std::string_view name) {
  for (CheckId id : all_checks)
    if (to_string(id) == name)
      return id;
  throw std::invalid_argument("unknown check '" + std::string(name) + "'");
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
  case CheckStatus::pass:
    return "pass";
  case CheckStatus::fail:
    return "fail";
  case CheckStatus::not_applicable:
    return "not-applicable";
  }
  return "unknown";
}

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

TheoremReport graded(CheckId id, double margin, double slack, std::string details) {
  return {id, margin >= -slack ? CheckStatus::pass : CheckStatus::fail, margin,
          std::move(details)};
}

TheoremReport skipped(CheckId id, std::string details) {
  return {id, CheckStatus::not_applicable, std::nullopt, std::move(details)};
}

// Shared quantities for one solution.
struct Context {
  const SolutionField& s;
  const DomainSpec& domain;
  const VerifyOptions& opt;
  const Mesh& mesh;
  double h;
  GradientField grad;
  double max_grad = 0.0;
  double u_max = 0.0;
  int argmax_u = -1;
  CriticalPointSet critical;

  Context(const SolutionField& field, const DomainSpec& d, const VerifyOptions& o)
      : s(field), domain(d), opt(o), mesh(*field.mesh), h(field.mesh->h),
        grad(gradient_field(field)) {
    max_grad = *std::max_element(grad.magnitude.begin(), grad.magnitude.end());
    argmax_u = argmax_vertex(s.u, mesh, false, false);
    u_max = s.u[argmax_u];
    critical = find_critical_points(s, o.critical_tol_fraction * max_grad);
    if (critical.count() == 1)
      u_max = std::max(u_max, critical.points.front().u);
  }
};

TheoremReport check_min_principle(const Context& c) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < c.s.u.size(); ++v)
    if (!c.mesh.boundary[v])
      lowest = std::min(lowest, c.s.u[v] - c.s.a);
  if (!std::isfinite(lowest))
    return skipped(CheckId::min_principle, "mesh has no interior vertices");
  return graded(CheckId::min_principle, lowest, c.opt.slack.min_principle * c.h * c.h * c.s.a,
                "min over interior vertices of u - a = " + fmt(lowest));
}

TheoremReport check_gradient_estimate(const Context& c) {
  try {
    const double bound = gradient_bound(c.s.H, c.u_max, c.s.a);
    return graded(CheckId::gradient_estimate, bound - c.max_grad, c.opt.slack.gradient * c.h,
                  "max|Du| = " + fmt(c.max_grad) + ", bound = " + fmt(bound) +
                      " (C = " + fmt(gradient_constant(c.s.H, c.u_max, c.s.a)) + ")");
  } catch (const BoundUndefined& e) {
    return skipped(CheckId::gradient_estimate, e.what());
  }
}

TheoremReport check_tilt(const Context& c) {
  if (!(c.s.H > 0.0 && c.s.H < 1.0))
    return skipped(CheckId::tilt_bound, "requires 0 < H < 1");
  const double bound = tilt_slope_bound(c.s.H);
  const double min_rho = 1.0 - c.s.H * std::sqrt(1.0 + c.max_grad * c.max_grad);
  return graded(CheckId::tilt_bound, bound - c.max_grad, c.opt.slack.tilt * c.h,
                "max|Du| = " + fmt(c.max_grad) + ", bound = " + fmt(bound) +
                    ", min 1 - H sqrt(1+|Du|^2) = " + fmt(min_rho));
}

TheoremReport check_unique_critical(const Context& c) {
  if (c.critical.degenerate)
    return skipped(CheckId::unique_critical_point, "degenerate field: |Du| vanishes");
  const std::size_t count = c.critical.count();
  if (count != 1)
    return {CheckId::unique_critical_point, CheckStatus::fail,
            -std::abs(static_cast<double>(count) - 1.0),
            "found " + std::to_string(count) + " critical points"};
  const double dist = (c.critical.points.front().position - c.mesh.vertices[c.argmax_u]).norm();
  return graded(CheckId::unique_critical_point, 2.0 * c.h - dist, 0.0,
                "1 critical point, distance to argmax u = " + fmt(dist));
}

TheoremReport check_boundary_gradient(const Context& c) {
  const int b = argmax_vertex(c.grad.magnitude, c.mesh, true, false);
  const int i = argmax_vertex(c.grad.magnitude, c.mesh, false, true);
  if (i < 0)
    return skipped(CheckId::boundary_gradient_max, "mesh has no interior vertices");
  const double margin = c.grad.magnitude[b] - c.grad.magnitude[i];
  return graded(CheckId::boundary_gradient_max, margin, c.opt.slack.boundary_gradient * c.h,
                "max boundary |Du| = " + fmt(c.grad.magnitude[b]) +
                    ", max interior |Du| = " + fmt(c.grad.magnitude[i]));
}

TheoremReport check_phi_max(const Context& c) {
  if (c.critical.count() != 1)
    return skipped(CheckId::phi_max_alpha2, "needs exactly one critical point");
  try {
    const PhiField f = phi(c.s, 2.0, c.opt.slack.rho * c.h);
    const int top = argmax_vertex(f.values, c.mesh, false, false);
    const double dist = (c.mesh.vertices[top] - c.critical.points.front().position).norm();
    return graded(CheckId::phi_max_alpha2, 2.0 * c.h - dist, 0.0,
                  "argmax Phi(x;2) at distance " + fmt(dist) + " from the critical point");
  } catch (const OutOfScope& e) {
    return skipped(CheckId::phi_max_alpha2, e.what());
  }
}

TheoremReport check_phi_min(const Context& c) {
  const double slack = c.opt.slack.phi_min * c.h;
  const bool round = c.domain.is_round();
  // Boundary within h of its circumscribed circle: the radial and
  // non-radial cases cannot be told apart at this resolution.
  const Circle circle = circumcircle(c.domain);
  double inner = circle.radius;
  for (const Vec2& p : c.domain.samples())
    inner = std::min(inner, (p - circle.center).norm());
  const bool near_radial = !round && circle.radius - inner <= c.h;
  double margin = std::numeric_limits<double>::infinity();
  std::ostringstream details;
  try {
    for (double alpha : {1.0, 1.5, 2.0}) {
      const PhiField f = phi(c.s, alpha, c.opt.slack.rho * c.h);
      double lo_b = std::numeric_limits<double>::infinity(), lo_i = lo_b;
      double hi = -lo_b;
      for (std::size_t v = 0; v < f.values.size(); ++v) {
        const double x = f.values[v];
        if (std::isnan(x))
          continue;
        if (c.mesh.boundary[v])
          lo_b = std::min(lo_b, x);
        else
          lo_i = std::min(lo_i, x);
        hi = std::max(hi, x);
      }
      const double spread = hi - std::min(lo_b, lo_i);
      if (alpha == 1.0 && (round || near_radial)) {
        // Radial solutions have constant Phi(x;1); the minimum has no location.
        // This branch passes iff spread <= phi_constant h, shifted onto the slack scale.
        const double m = c.opt.slack.phi_constant * c.h - spread;
        details << "alpha=1: " << (round ? "radial" : "degenerate-near-radial")
                << ", spread " << fmt(spread) << "; ";
        margin = std::min(margin, m - slack);
        continue;
      }
      details << "alpha=" << alpha << ": min interior - min boundary = " << fmt(lo_i - lo_b)
              << "; ";
      margin = std::min(margin, lo_i - lo_b);
    }
  } catch (const OutOfScope& e) {
    return skipped(CheckId::phi_min_boundary, e.what());
  }
  return graded(CheckId::phi_min_boundary, margin, slack, details.str());
}

TheoremReport check_height_lower(const Context& c) {
  const double kappa0 = curvature_extrema(c.domain).max;
  const double bound = height_lower_bound(c.s.H, kappa0) * c.s.a;
  return graded(CheckId::height_lower_bound, c.u_max - bound, c.opt.slack.height * c.h,
                "u_M = " + fmt(c.u_max) + ", lower bound (1-H)/kappa0 = " + fmt(bound));
}

TheoremReport check_height_upper(const Context& c) {
  const double R = circumradius(c.domain);
  try {
    const double bound = height_upper_bound(c.s.H, R, c.s.a);
    return graded(CheckId::height_upper_bound, bound - c.u_max, c.opt.slack.height * c.h,
                  "u_M = " + fmt(c.u_max) + ", upper bound m(1-H) = " + fmt(bound) +
                      " (circumradius " + fmt(R) + ")");
  } catch (const BoundUndefined& e) {
    return skipped(CheckId::height_upper_bound, e.what());
  }
}

TheoremReport check_nodal(const Context& c) {
  if (c.critical.degenerate)
    return skipped(CheckId::nodal_structure, "degenerate field: |Du| vanishes");
  int bad = 0;
  std::ostringstream details;
  const int n = std::max(1, c.opt.nodal_directions);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    const NodalSummary ns = nodal_summary(c.s, theta);
    if (ns.boundary_zero_count != 2 || ns.component_count != 1) {
      ++bad;
      details << "theta=" << fmt(theta) << ": " << ns.boundary_zero_count << " boundary zeros, "
              << ns.component_count << " components; ";
    }
  }
  if (bad == 0)
    details << n << " directions: 2 boundary zeros and 1 nodal line each";
  return graded(CheckId::nodal_structure, 0.0 - bad, 0.0, details.str());
}

} // namespace

std::vector<TheoremReport> verify_all(const SolutionField& s, const DomainSpec& domain,
                                      const VerifyOptions& options) {
  std::vector<CheckId> ids(options.checks.begin(), options.checks.end());
  if (ids.empty())
    ids.assign(std::begin(all_checks), std::end(all_checks));
  std::sort(ids.begin(), ids.end(), [](CheckId x, CheckId y) { return to_string(x) < to_string(y); });
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<TheoremReport> reports;
  if (!(s.H < 1.0)) {
    for (CheckId id : ids)
      reports.push_back(skipped(id, "checks require H < 1"));
    return reports;
  }

  const Context c(s, domain, options);
  for (CheckId id : ids) {
    switch (id) {
    case CheckId::boundary_gradient_max:
      reports.push_back(check_boundary_gradient(c));
      break;
    case CheckId::gradient_estimate:
      reports.push_back(check_gradient_estimate(c));
      break;
    case CheckId::height_lower_bound:
      reports.push_back(check_height_lower(c));
      break;
    case CheckId::height_upper_bound:
      reports.push_back(check_height_upper(c));
      break;
    case CheckId::min_principle:
      reports.push_back(check_min_principle(c));
      break;
    case CheckId::nodal_structure:
      reports.push_back(check_nodal(c));
      break;
    case CheckId::phi_max_alpha2:
      reports.push_back(check_phi_max(c));
      break;
    case CheckId::phi_min_boundary:
      reports.push_back(check_phi_min(c));
      break;
    case CheckId::tilt_bound:
      reports.push_back(check_tilt(c));
      break;
    case CheckId::unique_critical_point:
      reports.push_back(check_unique_critical(c));
      break;
    }
  }
  return reports;
}

} // namespace hcmc
