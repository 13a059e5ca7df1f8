#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcmc/analysis.hpp"
#include "hcmc/closed_form.hpp"
#include "oracles.hpp"

using namespace hcmc;
using doctest::Approx;

namespace {

struct Case {
  DomainSpec domain;
  SolutionField s;
};

Case solve_case(DomainKind kind, std::vector<double> params, double H, double h = 0.05) {
  DomainSpec d = make_domain(kind, std::move(params));
  SolutionField s = solve_dirichlet(d, H, 1.0, h);
  return {std::move(d), std::move(s)};
}

const TheoremReport& find(const std::vector<TheoremReport>& reports, CheckId id) {
  const auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& r) { return r.id == id; });
  REQUIRE(it != reports.end());
  return *it;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("Phi at a critical point") {
  CHECK(phi_at_critical_point(1.3, 0.0, 2.0) == Approx(4.0 * std::log(1.3)).epsilon(1e-14));
  CHECK(phi_at_critical_point(1.36, -1.0, 1.0) == Approx(2 * std::log(1.36) - 2 * std::log(2.0)));
}

TEST_CASE("Phi on the flat radial cap") {
  const Case c = solve_case(DomainKind::disc, {1.0}, 0.0);
  const double h = c.s.mesh->h;
  const PhiField one = phi(c.s, 1.0, h);
  CHECK(one.flagged.empty());
  const auto [lo, hi] = std::minmax_element(one.values.begin(), one.values.end());
  CHECK(*hi - *lo <= 3.0 * h);
  // Constant value 2 log m = log 2.
  for (double x : one.values)
    CHECK(std::abs(x - std::log(2.0)) <= 3.0 * h);

  const PhiField two = phi(c.s, 2.0, h);
  const auto top = std::max_element(two.values.begin(), two.values.end()) - two.values.begin();
  CHECK(c.s.mesh->vertices[top].norm() <= 2.0 * h);
  // Decreasing in r: the boundary minimum is below every value near the centre.
  double boundary_max = -1e300, centre_min = 1e300;
  for (std::size_t v = 0; v < two.values.size(); ++v) {
    if (c.s.mesh->boundary[v])
      boundary_max = std::max(boundary_max, two.values[v]);
    if (c.s.mesh->vertices[v].norm() < 0.3)
      centre_min = std::min(centre_min, two.values[v]);
  }
  CHECK(boundary_max < centre_min);
}

TEST_CASE("Phi outside the positivity region is out of scope") {
  auto mesh = std::make_shared<const Mesh>(triangulate(make_domain(DomainKind::disc, {0.6}), 0.1));
  SolutionField s{mesh, {}, 0.5, 1.0, {}};
  for (const Vec2& p : mesh->vertices)
    s.u.push_back(3.0 + 3.0 * p.x()); // |Du| = 3 > sqrt(3)
  CHECK_THROWS_AS(phi(s, 2.0, 0.1), OutOfScope);
  // A handful of flagged vertices is reported, not fatal.
  SolutionField t{mesh, std::vector<double>(mesh->vertex_count(), 1.0), 0.5, 1.0, {}};
  const PhiField f = phi(t, 2.0, 0.1);
  CHECK(f.flagged.empty());
  CHECK(f.values.front() == Approx(phi_at_critical_point(1.0, 0.5, 2.0)));
}

TEST_CASE("critical points") {
  SUBCASE("radial cap: one point at the centre") {
    const Case c = solve_case(DomainKind::disc, {0.6}, -0.5);
    const GradientField g = gradient_field(c.s);
    const double gmax = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    const CriticalPointSet set = find_critical_points(c.s, 0.25 * gmax);
    REQUIRE(set.count() == 1);
    CHECK(set.points[0].position.norm() <= 2.0 * c.s.mesh->h);
    CHECK(set.points[0].grad <= 0.25 * gmax);
    CHECK_FALSE(c.s.mesh->boundary[set.points[0].vertex]);
    CHECK(set.points[0].u == Approx(radial_cap(-0.5, 0.6).top()).epsilon(2e-3));
  }
  SUBCASE("ellipse with H = -1: one point") {
    const Case c = solve_case(DomainKind::ellipse, {0.5, 0.4}, -1.0);
    const GradientField g = gradient_field(c.s);
    const double gmax = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    const CriticalPointSet set = find_critical_points(c.s, 0.25 * gmax);
    CHECK(set.count() == 1);
    CHECK(set.points[0].position.norm() <= 2.0 * c.s.mesh->h);
  }
  SUBCASE("horosphere is degenerate") {
    const Case c = solve_case(DomainKind::ellipse, {0.5, 0.4}, 1.0, 0.1);
    const CriticalPointSet set = find_critical_points(c.s, 1e-3);
    CHECK(set.degenerate);
  }
  SUBCASE("double well: two maxima and a saddle") {
    auto mesh = std::make_shared<const Mesh>(triangulate(make_domain(DomainKind::ellipse, {1.0, 0.5}), 0.05));
    std::vector<double> u;
    for (const Vec2& p : mesh->vertices) {
      const double w = p.x() * p.x() - 0.25;
      u.push_back(2.0 - w * w - p.y() * p.y());
    }
    const GradientField g = gradient_field(*mesh, u);
    const double gmax = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    const CriticalPointSet set = find_critical_points(*mesh, u, 0.1 * gmax);
    REQUIRE(set.count() == 3);
    std::vector<double> xs;
    for (const CriticalPoint& c : set.points) {
      CHECK(std::abs(c.position.y()) <= mesh->h);
      xs.push_back(c.position.x());
    }
    std::sort(xs.begin(), xs.end());
    CHECK(std::abs(xs[0] + 0.5) <= mesh->h);
    CHECK(std::abs(xs[1]) <= mesh->h);
    CHECK(std::abs(xs[2] - 0.5) <= mesh->h);
  }
}

TEST_CASE("nodal structure") {
  SUBCASE("radial cap: a diameter for every direction") {
    const Case c = solve_case(DomainKind::disc, {0.6}, 0.0);
    for (int k = 0; k < 8; ++k) {
      const double theta = 2 * std::numbers::pi * k / 8;
      const NodalSummary a = nodal_summary(c.s, theta);
      const NodalSummary b = nodal_summary(c.s, theta + std::numbers::pi);
      CHECK(a.boundary_zero_count == 2);
      CHECK(a.component_count == 1);
      CHECK(a.boundary_zero_count == b.boundary_zero_count);
      CHECK(a.component_count == b.component_count);
      // v(theta + pi) = -v(theta).
      const auto va = directional_derivative(c.s, theta);
      const auto vb = directional_derivative(c.s, theta + std::numbers::pi);
      for (std::size_t v = 0; v < va.size(); ++v)
        CHECK(va[v] == Approx(-vb[v]).epsilon(1e-9).scale(1e-12));
    }
  }
  SUBCASE("ellipse with H = -1") {
    const Case c = solve_case(DomainKind::ellipse, {0.5, 0.4}, -1.0);
    const NodalSummary n = nodal_summary(c.s, 0.0);
    CHECK(n.boundary_zero_count == 2);
    CHECK(n.component_count == 1);
  }
  SUBCASE("constant field is degenerate") {
    const Case c = solve_case(DomainKind::disc, {0.6}, 1.0, 0.1);
    CHECK_THROWS_AS(nodal_summary(c.s, 0.3), DegenerateField);
  }
}

TEST_CASE("boundary normal identity") {
  SUBCASE("flat radial cap") {
    const Case c = solve_case(DomainKind::disc, {1.0}, 0.0);
    const auto samples = boundary_normal_residual(c.s, c.domain);
    CHECK(samples.size() == c.s.mesh->boundary_loop.size());
    double worst = 0.0, slope = 0.0;
    for (const auto& b : samples) {
      worst = std::max(worst, std::abs(b.residual));
      slope = std::max(slope, std::abs(b.u_n + 1.0));
      CHECK(b.kappa == Approx(1.0).epsilon(1e-9));
    }
    MESSAGE("max |residual| " << worst << ", max |u_n + 1| " << slope);
    CHECK(worst <= 10.0 * c.s.mesh->h);
    CHECK(slope <= 1.0 * c.s.mesh->h);
  }
  SUBCASE("horosphere") {
    const Case c = solve_case(DomainKind::ellipse, {0.5, 0.4}, 1.0, 0.1);
    for (const auto& b : boundary_normal_residual(c.s, c.domain))
      CHECK(std::abs(b.residual) <= 1e-12);
  }
  SUBCASE("outward derivative is negative") {
    for (double H : {-1.0, 0.0, 0.5}) {
      const Case c = solve_case(DomainKind::ellipse, {0.5, 0.4}, H);
      for (const auto& b : boundary_normal_residual(c.s, c.domain))
        CHECK(b.u_n < 0.0);
    }
  }
}

TEST_CASE("check names round-trip") {
  for (CheckId id : all_checks)
    CHECK(check_id_from_string(to_string(id)) == id);
  CHECK_THROWS_AS(check_id_from_string("lemma"), std::invalid_argument);
  CHECK(to_string(CheckStatus::not_applicable) == "not-applicable");
}

TEST_CASE("verify_all on the H = -1 disc baseline") {
  const Case c = solve_case(DomainKind::disc, {0.6}, -1.0);
  const auto reports = verify_all(c.s, c.domain);
  REQUIRE(reports.size() == std::size(all_checks));
  CHECK(std::is_sorted(reports.begin(), reports.end(),
                       [](const auto& x, const auto& y) { return to_string(x.id) < to_string(y.id); }));
  for (const TheoremReport& r : reports) {
    INFO(to_string(r.id) << ": " << r.details);
    CHECK(r.status != CheckStatus::fail);
    CHECK(r.margin.has_value() == (r.status != CheckStatus::not_applicable));
    if (r.margin && *r.margin >= 0.0)
      CHECK(r.status == CheckStatus::pass);
  }
  CHECK(find(reports, CheckId::tilt_bound).status == CheckStatus::not_applicable);
  CHECK(*find(reports, CheckId::height_lower_bound).margin == Approx(0.16).epsilon(0.03));
  CHECK(find(reports, CheckId::phi_min_boundary).details.find("radial") != std::string::npos);
}

TEST_CASE("verify_all: tilt bound applies for 0 < H < 1") {
  const Case c = solve_case(DomainKind::ellipse, {0.5, 0.4}, 0.5);
  const auto reports = verify_all(c.s, c.domain);
  const TheoremReport& tilt = find(reports, CheckId::tilt_bound);
  CHECK(tilt.status == CheckStatus::pass);
  REQUIRE(tilt.margin);
  CHECK(*tilt.margin > 0.0);
  for (const TheoremReport& r : reports) {
    INFO(to_string(r.id) << ": " << r.details);
    CHECK(r.status == CheckStatus::pass);
  }
}

TEST_CASE("verify_all: subsets, horosphere, near-radial ellipses") {
  const Case c = solve_case(DomainKind::disc, {1.0}, 0.0);
  VerifyOptions opt;
  opt.checks = {CheckId::unique_critical_point, CheckId::boundary_gradient_max};
  const auto two = verify_all(c.s, c.domain, opt);
  REQUIRE(two.size() == 2);
  CHECK(two[0].id == CheckId::boundary_gradient_max);
  CHECK(two[0].status == CheckStatus::pass);

  const Case flat = solve_case(DomainKind::disc, {1.0}, 1.0, 0.1);
  for (const TheoremReport& r : verify_all(flat.s, flat.domain)) {
    CHECK(r.status == CheckStatus::not_applicable);
    CHECK_FALSE(r.margin);
  }

  const Case nr = solve_case(DomainKind::ellipse, {0.5, 0.49}, -0.5);
  const auto reports = verify_all(nr.s, nr.domain);
  CHECK(find(reports, CheckId::phi_min_boundary).details.find("degenerate-near-radial") !=
        std::string::npos);
}

TEST_CASE("a wrong solution fails the checks") {
  // The cap for H = 0 checked as if it solved H = 0.5: heights exceed the
  // upper bound for H = 0.5.
  const Case c = solve_case(DomainKind::disc, {0.6}, 0.0);
  SolutionField wrong = c.s;
  wrong.H = 0.5;
  for (double& x : wrong.u)
    x = 1.0 + 3.0 * (x - 1.0);
  const auto reports = verify_all(wrong, c.domain);
  CHECK(find(reports, CheckId::height_upper_bound).status == CheckStatus::fail);
  CHECK(*find(reports, CheckId::height_upper_bound).margin < 0.0);
}

} // TEST_SUITE
