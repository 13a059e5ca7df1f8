#pragma once

// Reference values computed independently of the library: closed forms by
// bisection and direct substitution, brute-force geometry.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oracle {

/// Sphere radius of the cap c0 + sqrt(m^2 - r^2), c0 = -m H, with w(R) = a,
/// found by bisection on w(R) - a (increasing in m for H < 1).
inline double cap_m(double H, double R, double a) {
  auto f = [&](double m) { return -m * H + std::sqrt(m * m - R * R) - a; };
  double lo = R, hi = 2.0 * R + 2.0 * a;
  while (f(hi) < 0.0)
    hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double cap_u(double r, double H, double m) { return -m * H + std::sqrt(m * m - r * r); }

/// Equation residual of a radial profile with analytic derivatives:
/// u''/W^3 + u'/(r W) + (2/u)(1/W - H).
inline double cap_equation_residual(double r, double H, double m) {
  const double s = std::sqrt(m * m - r * r);
  const double u = -m * H + s;
  const double up = -r / s;
  const double upp = -m * m / (s * s * s);
  const double W = std::sqrt(1.0 + up * up);
  return upp / (W * W * W) + up / (r * W) + (2.0 / u) * (1.0 / W - H);
}

inline double window(double H) { return -2.0 - 1.0 / H + 2.0 * std::sqrt(H / (H - 1.0)); }

inline double gradient_bound(double H, double uM, double a) {
  const double C = uM * uM / ((1.0 - H) * a * a);
  return std::sqrt(C * C - (1.0 + H * C) * (1.0 + H * C)) / (1.0 + H * C);
}

/// Ramanujan's second approximation; relative error below 1e-9 for q/p >= 0.5.
inline double ellipse_perimeter(double p, double q) {
  const double h = (p - q) * (p - q) / ((p + q) * (p + q));
  return std::numbers::pi * (p + q) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

/// Ellipse curvature at angle parameter t.
inline double ellipse_curvature(double p, double q, double t) {
  const double s = std::sqrt(p * p * std::sin(t) * std::sin(t) + q * q * std::cos(t) * std::cos(t));
  return p * q / (s * s * s);
}

struct Circle {
  Eigen::Vector2d c;
  double r;
};

/// Minimum enclosing circle by exhaustive search over pairs and triples.
inline Circle enclosing_circle(std::span<const Eigen::Vector2d> pts) {
  auto covers = [&](const Circle& C) {
    for (const auto& p : pts)
      if ((p - C.c).norm() > C.r * (1 + 1e-12) + 1e-12)
        return false;
    return true;
  };
  Circle best{Eigen::Vector2d::Zero(), std::numeric_limits<double>::infinity()};
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Circle C{0.5 * (pts[i] + pts[j]), 0.5 * (pts[i] - pts[j]).norm()};
      if (C.r < best.r && covers(C))
        best = C;
      for (std::size_t k = j + 1; k < n; ++k) {
        const Eigen::Vector2d a = pts[i], b = pts[j], c = pts[k];
        const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
        if (std::abs(d) < 1e-14)
          continue;
        const double ux = (a.squaredNorm() * (b.y() - c.y()) + b.squaredNorm() * (c.y() - a.y()) +
                           c.squaredNorm() * (a.y() - b.y())) / d;
        const double uy = (a.squaredNorm() * (c.x() - b.x()) + b.squaredNorm() * (a.x() - c.x()) +
                           c.squaredNorm() * (b.x() - a.x())) / d;
        const Circle T{Eigen::Vector2d(ux, uy), (a - Eigen::Vector2d(ux, uy)).norm()};
        if (T.r < best.r && covers(T))
          best = T;
      }
    }
  return best;
}

} // namespace oracle
