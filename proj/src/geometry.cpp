#include "hcmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "spline.hpp"

namespace hcmc {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace

std::string_view to_string(DomainKind kind) {
  switch (kind) {
  case DomainKind::disc:
    return "disc";
  case DomainKind::ellipse:
    return "ellipse";
  case DomainKind::curve:
    return "curve";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(std::string_view name) {
  if (name == "disc")
    return DomainKind::disc;
  if (name == "ellipse")
    return DomainKind::ellipse;
  if (name == "curve" || name == "generic-curve")
    return DomainKind::curve;
  throw DomainError("unknown domain kind '" + std::string(name) + "'");
}

double DomainSpec::period() const {
  return kind_ == DomainKind::curve ? spline_x_->period() : two_pi;
}

Vec2 DomainSpec::point(double t) const {
  switch (kind_) {
  case DomainKind::disc:
    return center_ + params_[0] * Vec2(std::cos(t), std::sin(t));
  case DomainKind::ellipse:
    return center_ + Vec2(params_[0] * std::cos(t), params_[1] * std::sin(t));
  case DomainKind::curve:
    break;
  }
  return Vec2(spline_x_->value(t), spline_y_->value(t));
}

Vec2 DomainSpec::derivative(double t) const {
  switch (kind_) {
  case DomainKind::disc:
    return params_[0] * Vec2(-std::sin(t), std::cos(t));
  case DomainKind::ellipse:
    return Vec2(-params_[0] * std::sin(t), params_[1] * std::cos(t));
  case DomainKind::curve:
    break;
  }
  return Vec2(spline_x_->first(t), spline_y_->first(t));
}

Vec2 DomainSpec::second_derivative(double t) const {
  switch (kind_) {
  case DomainKind::disc:
    return -params_[0] * Vec2(std::cos(t), std::sin(t));
  case DomainKind::ellipse:
    return Vec2(-params_[0] * std::cos(t), -params_[1] * std::sin(t));
  case DomainKind::curve:
    break;
  }
  return Vec2(spline_x_->second(t), spline_y_->second(t));
}

double DomainSpec::curvature(double t) const {
  const Vec2 d1 = derivative(t);
  const double speed = d1.norm();
  return cross(d1, second_derivative(t)) / (speed * speed * speed);
}

Vec2 DomainSpec::outward_normal(double t) const {
  const Vec2 d1 = derivative(t).normalized();
  return Vec2(d1.y(), -d1.x());
}

bool DomainSpec::is_round() const {
  return kind_ == DomainKind::disc ||
         (kind_ == DomainKind::ellipse && params_[0] == params_[1]);
}

void DomainSpec::finalize() {
  const std::size_t n = sample_count;
  const double T = period();
  sample_params_.resize(n);
  samples_.resize(n);
  perimeter_ = 0.0;
  area_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(n);
    sample_params_[i] = t;
    samples_[i] = point(t);
    // Periodic trapezoid rule.
    perimeter_ += derivative(t).norm() * T / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i)
    area_ += 0.5 * cross(samples_[i], samples_[(i + 1) % n]);

  diameter_ = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      diameter_ = std::max(diameter_, (samples_[i] - samples_[j]).squaredNorm());
  diameter_ = std::sqrt(diameter_);
  if (!(diameter_ > 0.0) || !std::isfinite(diameter_))
    throw DomainError("degenerate domain: zero diameter");

  const double kappa_floor = convexity_tolerance / diameter_;
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sample_params_[i];
    const double kappa = curvature(t);
    if (!(kappa > kappa_floor)) {
      std::ostringstream msg;
      msg << "domain is not strictly convex: curvature " << kappa
          << " at boundary parameter " << t;
      throw DomainError(msg.str());
    }
    const Vec2 a = derivative(t);
    const Vec2 b = derivative(sample_params_[(i + 1) % n]);
    turning += std::atan2(cross(a, b), a.dot(b));
  }
  if (std::abs(turning - two_pi) > 1e-3 * two_pi)
    throw DomainError("boundary is not a simple closed convex curve");
}

DomainSpec make_domain(DomainKind kind, std::vector<double> params, Vec2 center) {
  DomainSpec d;
  d.kind_ = kind;
  d.center_ = center;
  for (double v : params)
    if (!std::isfinite(v))
      throw DomainError("domain parameters must be finite");
  if (!center.allFinite())
    throw DomainError("domain center must be finite");
  switch (kind) {
  case DomainKind::disc:
    if (params.size() != 1)
      throw DomainError("disc expects one parameter (radius)");
    if (!(params[0] > 0.0))
      throw DomainError("degenerate disc: radius must be positive");
    break;
  case DomainKind::ellipse:
    if (params.size() != 2)
      throw DomainError("ellipse expects two parameters (semi-axes p, q)");
    if (!(params[0] > 0.0) || !(params[1] > 0.0))
      throw DomainError("degenerate ellipse: semi-axes must be positive");
    break;
  case DomainKind::curve:
    throw DomainError("curve domains are built from boundary points");
  }
  d.params_ = std::move(params);
  d.finalize();
  return d;
}

DomainSpec make_curve_domain(std::span<const Vec2> input) {
  if (input.size() < 5)
    throw DomainError("curve domain needs at least 5 boundary points");
  std::vector<Vec2> pts(input.begin(), input.end());
  for (const Vec2& p : pts)
    if (!p.allFinite())
      throw DomainError("curve points must be finite");
  double signed_area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    signed_area += cross(pts[i], pts[(i + 1) % pts.size()]);
  if (signed_area < 0.0)
    std::reverse(pts.begin(), pts.end());

  std::vector<double> knots(pts.size());
  std::vector<double> xs(pts.size()), ys(pts.size());
  double length = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    knots[i] = length;
    xs[i] = pts[i].x();
    ys[i] = pts[i].y();
    const double chord = (pts[(i + 1) % pts.size()] - pts[i]).norm();
    if (!(chord > 0.0))
      throw DomainError("curve has repeated consecutive points");
    length += chord;
  }

  DomainSpec d;
  d.kind_ = DomainKind::curve;
  d.spline_x_ = std::make_shared<PeriodicSpline>(knots, std::move(xs), length);
  d.spline_y_ = std::make_shared<PeriodicSpline>(std::move(knots), std::move(ys), length);
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : pts)
    centroid += p;
  d.center_ = centroid / static_cast<double>(pts.size());
  d.finalize();
  return d;
}

DomainSpec load_curve_domain(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw DomainError("cannot open curve file '" + file.string() + "'");
  std::vector<Vec2> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::istringstream fields(line);
    double x = 0.0, y = 0.0;
    if (!(fields >> x >> y))
      throw DomainError(file.string() + ":" + std::to_string(line_no) +
                        ": expected two numbers 'x y'");
    pts.emplace_back(x, y);
  }
  return make_curve_domain(pts);
}

CurvatureRange curvature_extrema(const DomainSpec& domain) {
  CurvatureRange range{std::numeric_limits<double>::infinity(), 0.0};
  for (double t : domain.sample_params()) {
    const double k = domain.curvature(t);
    range.min = std::min(range.min, k);
    range.max = std::max(range.max, k);
  }
  return range;
}

namespace {

bool covers(const Circle& c, const Vec2& p) {
  return (p - c.center).norm() <= c.radius * (1.0 + 1e-12) + 1e-300;
}

Circle circle_from(const Vec2& a, const Vec2& b) {
  return {0.5 * (a + b), 0.5 * (a - b).norm()};
}

Circle circle_from(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  if (std::abs(d) < 1e-300) {
    Circle best = circle_from(a, b);
    for (const Circle& alt : {circle_from(a, c), circle_from(b, c)})
      if (alt.radius > best.radius)
        best = alt;
    return best;
  }
  const double b2 = ab.squaredNorm(), c2 = ac.squaredNorm();
  const Vec2 offset((ac.y() * b2 - ab.y() * c2) / d, (ab.x() * c2 - ac.x() * b2) / d);
  return {a + offset, offset.norm()};
}

} // namespace

Circle min_enclosing_circle(std::span<const Vec2> points) {
  if (points.empty())
    return {};
  std::vector<Vec2> p(points.begin(), points.end());
  std::mt19937 rng(20240613u);
  std::shuffle(p.begin(), p.end(), rng);

  Circle c{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (covers(c, p[i]))
      continue;
    c = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (covers(c, p[j]))
        continue;
      c = circle_from(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!covers(c, p[k]))
          c = circle_from(p[i], p[j], p[k]);
    }
  }
  return c;
}

Circle circumcircle(const DomainSpec& domain) {
  return min_enclosing_circle(domain.samples());
}

double circumradius(const DomainSpec& domain) { return circumcircle(domain).radius; }

} // namespace hcmc
