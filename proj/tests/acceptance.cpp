// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "hcmc/analysis.hpp"
#include "hcmc/closed_form.hpp"
#include "hcmc/solver.hpp"
#include "oracles.hpp"

using namespace hcmc;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances, fixed here and nowhere else.
constexpr double h_matrix = 0.05;
constexpr double radial_error_tol = 5e-3;
constexpr double min_order = 1.7;
constexpr double max_solve_seconds = 30.0;
constexpr double window_rel_tol = 5e-6;      // five significant digits
constexpr double vertex_gradient_c = 6.0;    // |max vertex |Du| - rim slope| <= c h
constexpr double jacobian_rel_tol = 1e-6;
constexpr int jacobian_states = 10;

const SlackConstants slack{};

int failures = 0;

void report(const char* id, bool ok, const std::string& text) {
  std::printf("%s %s %s\n", id, ok ? "PASS" : "FAIL", text.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

template <class... T>
std::string str(const T&... parts) {
  std::ostringstream s;
  s.precision(6);
  (s << ... << parts);
  return s.str();
}

double max_error(const SolutionField& s, double R) {
  const double m = oracle::cap_m(s.H, R, s.a);
  double err = 0.0;
  for (std::size_t v = 0; v < s.u.size(); ++v)
    err = std::max(err, std::abs(s.u[v] - oracle::cap_u(std::min(s.mesh->vertices[v].norm(), R), s.H, m)));
  return err;
}

double max_of(const std::vector<double>& x) { return *std::max_element(x.begin(), x.end()); }

struct MatrixCase {
  std::string name;
  DomainSpec domain;
  double H;
  std::optional<SolutionField> s;
  std::string error;
};

int argmax_vertex(const std::vector<double>& values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

int argmin_vertex(const std::vector<double>& values) {
  int best = -1;
  for (std::size_t v = 0; v < values.size(); ++v)
    if (!std::isnan(values[v]) && (best < 0 || values[v] < values[static_cast<std::size_t>(best)]))
      best = static_cast<int>(v);
  return best;
}

CriticalPointSet critical(const SolutionField& s) {
  const double gmax = max_of(gradient_field(s).magnitude);
  return find_critical_points(s, 0.25 * gmax);
}

} // namespace

int main() {
  const auto start = Clock::now();

  // Test matrix: {disc R = 0.6, ellipse (0.5, 0.4)} x H in {-1, -0.5, 0, 0.5}.
  std::vector<MatrixCase> matrix;
  for (double H : {-1.0, -0.5, 0.0, 0.5}) {
    matrix.push_back({str("disc(0.6) H=", H), make_domain(DomainKind::disc, {0.6}), H, {}, {}});
    matrix.push_back({str("ellipse(0.5,0.4) H=", H), make_domain(DomainKind::ellipse, {0.5, 0.4}), H, {}, {}});
  }
  for (MatrixCase& c : matrix) {
    try {
      c.s = solve_dirichlet(c.domain, c.H, 1.0, h_matrix);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  }
  auto all_converged = [&](std::string& why) {
    for (const MatrixCase& c : matrix)
      if (!c.s) {
        why += c.name + ": " + c.error + "; ";
        return false;
      }
    return true;
  };

  // AC1: radial oracle convergence, disc R = 1, H = 0.
  {
    const DomainSpec d = make_domain(DomainKind::disc, {1.0});
    std::vector<double> errors;
    double slowest = 0.0;
    bool ok = true;
    for (double h : {0.2, 0.1, 0.05}) {
      const auto t0 = Clock::now();
      try {
        errors.push_back(max_error(solve_dirichlet(d, 0.0, 1.0, h), 1.0));
      } catch (const std::exception& e) {
        ok = false;
        errors.push_back(NAN);
      }
      slowest = std::max(slowest, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    const double order = std::log2(errors[0] / errors[2]) / 2.0;
    ok = ok && errors[2] <= radial_error_tol && order >= min_order && slowest <= max_solve_seconds;
    report("AC1", ok,
           str("radial convergence: max error at h=0.05 ", errors[2], " (<= ", radial_error_tol, "), errors ",
               errors[0], " / ", errors[1], " / ", errors[2], ", observed order ", order, " (>= ", min_order,
               "), slowest solve ", slowest, " s"));
  }

  // AC2: existence window and the H = -1 solve inside it.
  {
    const double w1 = existence_window(-1.0), w2 = existence_window(-0.5);
    bool ok = std::abs(w1 - (std::sqrt(2.0) - 1.0)) <= window_rel_tol * w1 &&
              std::abs(w2 - 2.0 / std::sqrt(3.0)) <= window_rel_tol * w2 && 0.36 < w1;
    double uM = NAN;
    try {
      const SolutionField s = solve_dirichlet(make_domain(DomainKind::disc, {0.6}), -1.0, 1.0, h_matrix);
      uM = s.max_value();
      ok = ok && s.diagnostics.converged && std::abs(uM - 1.36) <= radial_error_tol;
    } catch (const std::exception& e) {
      ok = false;
    }
    report("AC2", ok,
           str("existence window: W(-1) = ", w1, ", W(-0.5) = ", w2, "; disc R=0.6 (R^2 = 0.36 < W(-1)), H=-1 u_M = ",
               uM, " (target 1.36 +- ", radial_error_tol, ")"));
  }

  // AC3: gradient estimate on the radial baselines.
  {
    const double b1 = gradient_bound(-1.0, 1.36, 1.0);
    const double b0 = gradient_bound(0.0, std::sqrt(2.0), 1.0);
    bool ok = std::abs(b1 - 12.257) <= 5e-4 && std::abs(b0 - std::sqrt(3.0)) <= 1e-12;
    std::string text;
    for (auto [R, H] : {std::pair{0.6, -1.0}, std::pair{1.0, 0.0}}) {
      const SolutionField s = solve_dirichlet(make_domain(DomainKind::disc, {R}), H, 1.0, h_matrix);
      const double q = max_of(gradient_field(s).magnitude);
      const double bound = gradient_bound(H, s.max_value(), 1.0);
      const double rim = radial_cap(H, R).rim_slope();
      ok = ok && q <= bound + slack.gradient * h_matrix && std::abs(q - rim) <= vertex_gradient_c * h_matrix;
      text += str("disc R=", R, " H=", H, ": max|Du| = ", q, " (rim slope ", rim, "), bound = ", bound, "; ");
    }
    report("AC3", ok, str("gradient estimate: bound(H=-1, u_M=1.36) = ", b1, ", bound(H=0, u_M=sqrt2) = ", b0, "; ", text));
  }

  // AC4: tilt bound and positivity of 1 - H sqrt(1 + q^2), ellipse H = 0.5.
  {
    const MatrixCase& c = matrix[7];
    bool ok = c.s.has_value();
    double q = NAN, rho = NAN;
    if (ok) {
      const auto mag = gradient_field(*c.s).magnitude;
      q = max_of(mag);
      rho = 1e300;
      for (double x : mag)
        rho = std::min(rho, 1.0 - 0.5 * std::sqrt(1.0 + x * x));
      ok = q <= std::sqrt(3.0) + slack.tilt * h_matrix && rho >= -slack.rho * h_matrix;
    }
    report("AC4", ok, str("tilt bound on ", c.name, ": max|Du| = ", q, " <= sqrt3 + ", slack.tilt, "h; min rho = ", rho));
  }

  // AC5: minimum principle across the matrix.
  {
    std::string why;
    bool ok = all_converged(why);
    double worst = 1e300;
    for (const MatrixCase& c : matrix) {
      if (!c.s)
        continue;
      for (std::size_t v = 0; v < c.s->u.size(); ++v)
        if (!c.s->mesh->boundary[v])
          worst = std::min(worst, c.s->u[v] - 1.0);
    }
    ok = ok && worst > 0.0;
    report("AC5", ok, str("minimum principle: min over matrix interiors of u - a = ", worst, " (> 0) ", why));
  }

  // AC6: unique critical point and nodal structure.
  {
    std::string why;
    bool ok = all_converged(why);
    double worst = 0.0;
    for (const MatrixCase& c : matrix) {
      if (!c.s)
        continue;
      const CriticalPointSet set = critical(*c.s);
      if (set.count() != 1) {
        ok = false;
        why += str(c.name, ": ", set.count(), " critical points; ");
        continue;
      }
      const double d = (set.points[0].position - c.s->mesh->vertices[argmax_vertex(c.s->u)]).norm();
      worst = std::max(worst, d);
      ok = ok && d <= 2.0 * h_matrix;
    }
    const MatrixCase& e = matrix[1]; // ellipse, H = -1
    int nodal_bad = 0;
    if (e.s)
      for (int k = 0; k < 8; ++k) {
        const NodalSummary n = nodal_summary(*e.s, 2.0 * std::numbers::pi * k / 8);
        nodal_bad += (n.boundary_zero_count == 2 && n.component_count == 1) ? 0 : 1;
      }
    ok = ok && nodal_bad == 0;
    report("AC6", ok,
           str("critical points: one per case, max distance to argmax u = ", worst, " (<= 2h); nodal: ", 8 - nodal_bad,
               "/8 directions with 2 boundary zeros and 1 line on ", e.name, " ", why));
  }

  // AC7: Phi principles.
  {
    std::string why;
    bool ok = all_converged(why);
    double worst = 0.0;
    for (const MatrixCase& c : matrix) {
      if (!c.s)
        continue;
      const CriticalPointSet set = critical(*c.s);
      if (set.count() != 1)
        continue;
      const PhiField f = phi(*c.s, 2.0, slack.rho * h_matrix);
      const double d = (c.s->mesh->vertices[argmax_vertex(f.values)] - set.points[0].position).norm();
      worst = std::max(worst, d);
      ok = ok && d <= 2.0 * h_matrix;
    }
    int interior_minima = 0;
    for (const MatrixCase& c : matrix) {
      if (!c.s || c.domain.is_round())
        continue;
      for (double alpha : {1.0, 1.5, 2.0}) {
        const PhiField f = phi(*c.s, alpha, slack.rho * h_matrix);
        if (!c.s->mesh->boundary[argmin_vertex(f.values)]) {
          ++interior_minima;
          why += str(c.name, " alpha=", alpha, ": interior argmin; ");
        }
      }
    }
    ok = ok && interior_minima == 0;
    const SolutionField flat = solve_dirichlet(make_domain(DomainKind::disc, {1.0}), 0.0, 1.0, h_matrix);
    const PhiField one = phi(flat, 1.0, slack.rho * h_matrix);
    const auto [lo, hi] = std::minmax_element(one.values.begin(), one.values.end());
    double far = 0.0;
    for (double x : one.values)
      far = std::max(far, std::abs(x - std::log(2.0)));
    const double c_h = slack.phi_constant * h_matrix;
    ok = ok && *hi - *lo <= c_h && far <= c_h;
    report("AC7", ok,
           str("Phi: argmax Phi(.;2) within ", worst, " of the critical point (<= 2h); argmin Phi(.;alpha) on the "
               "boundary for all ellipse cases, alpha in {1,1.5,2}; flat cap Phi(.;1) spread ",
               *hi - *lo, ", max |Phi - log 2| = ", far, " (<= ", c_h, ") ", why));
  }

  // AC8: height sandwich.
  {
    std::string why;
    bool ok = all_converged(why);
    ok = ok && std::abs(height_lower_bound(-1.0, 1.0 / 0.6) - 1.2) <= 1e-12 &&
         std::abs(height_upper_bound(-1.0, 0.6, 1.0) - 1.36) <= 1e-12;
    double low = 1e300, up = 1e300, strict = 1e300;
    for (const MatrixCase& c : matrix) {
      if (!c.s)
        continue;
      const double uM = c.s->max_value();
      const double lower = height_lower_bound(c.H, curvature_extrema(c.domain).max);
      const double upper = height_upper_bound(c.H, circumradius(c.domain), 1.0);
      low = std::min(low, uM - lower);
      up = std::min(up, upper - uM);
      if (!c.domain.is_round())
        strict = std::min(strict, upper - uM);
    }
    const double sl = slack.height * h_matrix;
    ok = ok && low >= -sl && up >= -sl && strict > 0.0;
    report("AC8", ok,
           str("height bounds: min(u_M - lower) = ", low, ", min(upper - u_M) = ", up, " (>= -", sl,
               "), strict on non-radial cases: ", strict, " > 0; disc R=0.6 H=-1 sandwich 1.2 <= 1.36 <= 1.36 ", why));
  }

  // AC9: |Du| is largest on the boundary.
  {
    std::string why;
    bool ok = all_converged(why);
    int misses = 0;
    for (const MatrixCase& c : matrix) {
      if (!c.s)
        continue;
      const auto mag = gradient_field(*c.s).magnitude;
      if (!c.s->mesh->boundary[argmax_vertex(mag)]) {
        ++misses;
        why += c.name + "; ";
      }
    }
    ok = ok && misses == 0;
    report("AC9", ok, str("boundary gradient maximum: argmax vertex |Du| on the boundary in ", 8 - misses, "/8 cases ", why));
  }

  // AC10: Jacobian against central differences on random states.
  {
    std::mt19937 rng(20240613);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> U(0.7, 1.8), UH(-1.0, 0.9);
    double worst = 0.0;
    int states = 0;
    for (const MatrixCase* c : {&matrix[0], &matrix[1]}) {
      const Mesh mesh = triangulate(c->domain, h_matrix);
      for (int k = 0; k < jacobian_states; ++k) {
        std::vector<double> u(mesh.vertex_count()), d(mesh.vertex_count());
        for (double& x : u)
          x = U(rng);
        for (double& x : d)
          x = g(rng);
        const double H = UH(rng), eps = 1e-6;
        std::vector<double> up(u), um(u);
        for (std::size_t i = 0; i < u.size(); ++i) {
          up[i] += eps * d[i];
          um[i] -= eps * d[i];
        }
        const Eigen::VectorXd fd = (residual(mesh, up, H, 1.0) - residual(mesh, um, H, 1.0)) / (2 * eps);
        const Eigen::VectorXd Jd =
            jacobian(mesh, u, H) * Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
        worst = std::max(worst, (fd - Jd).norm() / Jd.norm());
        ++states;
      }
    }
    const double total = std::chrono::duration<double>(Clock::now() - start).count();
    report("AC10", worst <= jacobian_rel_tol,
           str("Jacobian: max relative mismatch ", worst, " over ", states, " random states on 2 meshes (<= ",
               jacobian_rel_tol, "); acceptance wall clock ", total, " s"));
  }
  return failures == 0 ? 0 : 1;
}
