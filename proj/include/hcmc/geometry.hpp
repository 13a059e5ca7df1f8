#pragma once

// Bounded strictly convex planar domains described by a closed,
// counterclockwise boundary curve.

#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace hcmc {

using Vec2 = Eigen::Vector2d;

/// Raised for degenerate, non-convex or otherwise unusable domain input.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class DomainKind { disc, ellipse, curve };

std::string_view to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

class PeriodicSpline;

/// Boundary description of a strictly convex domain.
///
/// The boundary is a C2 closed curve r(t), t in [0, period()), traversed
/// counterclockwise. Discs and ellipses use the angular parameter; generic
/// curves use cumulative chord length of the input samples with a periodic
/// cubic spline through them.
class DomainSpec {
public:
  DomainKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const Vec2& center() const { return center_; }

  double period() const;
  Vec2 point(double t) const;
  Vec2 derivative(double t) const;
  Vec2 second_derivative(double t) const;
  double curvature(double t) const;
  Vec2 outward_normal(double t) const;

  /// Uniform-in-parameter boundary samples (at least 512).
  const std::vector<double>& sample_params() const { return sample_params_; }
  const std::vector<Vec2>& samples() const { return samples_; }

  double diameter() const { return diameter_; }
  double perimeter() const { return perimeter_; }
  double area() const { return area_; }

  /// True when the boundary is a circle (the radial case).
  bool is_round() const;

  static constexpr std::size_t sample_count = 4096;

private:
  friend DomainSpec make_domain(DomainKind, std::vector<double>, Vec2);
  friend DomainSpec make_curve_domain(std::span<const Vec2>);

  DomainSpec() = default;
  void finalize();

  DomainKind kind_ = DomainKind::disc;
  std::vector<double> params_;
  Vec2 center_ = Vec2::Zero();
  std::shared_ptr<const PeriodicSpline> spline_x_;
  std::shared_ptr<const PeriodicSpline> spline_y_;
  std::vector<double> sample_params_;
  std::vector<Vec2> samples_;
  double diameter_ = 0.0;
  double perimeter_ = 0.0;
  double area_ = 0.0;
};

/// Builds a disc (params = {R}) or an ellipse (params = {p, q}, semi-axes
/// along x and y). Throws DomainError for degenerate parameters or a
/// boundary whose sampled curvature is not strictly positive.
DomainSpec make_domain(DomainKind kind, std::vector<double> params,
                       Vec2 center = Vec2::Zero());

/// Periodic cubic spline through the given points (closed implicitly).
/// Clockwise input is reversed.
DomainSpec make_curve_domain(std::span<const Vec2> points);

/// Reads a two-column "x y" point file and builds a curve domain.
DomainSpec load_curve_domain(const std::filesystem::path& file);

struct CurvatureRange {
  double min = 0.0;
  double max = 0.0;
};

CurvatureRange curvature_extrema(const DomainSpec& domain);

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Minimum enclosing circle (Welzl, deterministic shuffle).
Circle min_enclosing_circle(std::span<const Vec2> points);

/// Minimum enclosing circle of the sampled boundary.
Circle circumcircle(const DomainSpec& domain);
double circumradius(const DomainSpec& domain);

/// Smallest admissible curvature relative to 1/diameter.
inline constexpr double convexity_tolerance = 1e-8;

} // namespace hcmc
