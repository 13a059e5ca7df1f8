#include "hcmc/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace hcmc {

double RadialCap::height(double r) const { return c0 + std::sqrt(m * m - r * r); }

double RadialCap::slope(double r) const { return -r / std::sqrt(m * m - r * r); }

double RadialCap::curvature(double r) const {
  const double s = std::sqrt(m * m - r * r);
  return -m * m / (s * s * s);
}

double RadialCap::rim_slope() const { return R / std::sqrt(m * m - R * R); }

RadialCap radial_cap(double H, double R, double a) {
  if (!(H < 1.0))
    throw std::invalid_argument("radial cap requires H < 1");
  if (!(R > 0.0) || !(a > 0.0))
    throw std::invalid_argument("radial cap requires R > 0 and a > 0");

  // c0 = -m H and (a - c0)^2 + R^2 = m^2 give
  //   (1 - H^2) m^2 - 2 a H m - (a^2 + R^2) = 0.
  const double A = 1.0 - H * H;
  const double B = -2.0 * a * H;
  const double C = -(a * a + R * R);
  std::vector<double> roots;
  if (std::abs(A) < 1e-8) {
    roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      roots.push_back(q / A);
      if (q != 0.0)
        roots.push_back(C / q);
    }
  }

  // Admissible: m > R and sqrt(m^2 - R^2) = a + m H (the positive branch).
  double best = -1.0;
  for (double m : roots)
    if (std::isfinite(m) && m > R && a + m * H > 0.0)
      best = std::max(best, m);
  if (best < 0.0) {
    std::ostringstream msg;
    msg << "no spherical cap graph with H = " << H << " over a disc of radius " << R
        << " at height " << a;
    throw BoundUndefined(msg.str());
  }
  return RadialCap{H, R, a, best, -best * H};
}

double existence_window(double H) {
  if (!(H >= -1.0 && H < 0.0))
    throw BoundUndefined("existence window requires -1 <= H < 0");
  return -2.0 - 1.0 / H + 2.0 * std::sqrt(H / (H - 1.0));
}

double gradient_constant(double H, double u_max, double a) {
  return u_max * u_max / ((1.0 - H) * a * a);
}

double gradient_bound(double H, double u_max, double a) {
  if (!(H < 1.0))
    throw std::invalid_argument("gradient bound requires H < 1");
  if (!(a > 0.0) || !(u_max > 0.0))
    throw std::invalid_argument("gradient bound requires a > 0 and u_max > 0");
  const double C = gradient_constant(H, u_max, a);
  const double denom = 1.0 + H * C;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "gradient bound undefined: u_max = " << u_max
        << " violates u_max < sqrt((H-1)/H) a = " << std::sqrt((H - 1.0) / H) * a;
    throw BoundUndefined(msg.str());
  }
  return std::sqrt(std::max(0.0, C * C - denom * denom)) / denom;
}

double tilt_slope_bound(double H) {
  if (H > 0.0 && H < 1.0)
    return std::sqrt(1.0 - H * H) / H;
  return std::numeric_limits<double>::infinity();
}

double height_lower_bound(double H, double kappa_max) {
  if (!(kappa_max > 0.0))
    throw std::invalid_argument("height lower bound requires positive curvature");
  return (1.0 - H) / kappa_max;
}

double height_upper_bound(double H, double R, double a) {
  return radial_cap(H, R, a).top();
}

BoundSet evaluate_bounds(double H, double a, double u_max, double kappa_max,
                         double circumradius) {
  BoundSet b;
  b.C = gradient_constant(H, u_max, a);
  try {
    b.gradient = gradient_bound(H, u_max, a);
  } catch (const BoundUndefined&) {
  }
  b.tilt = tilt_slope_bound(H);
  b.height_lower = height_lower_bound(H, kappa_max);
  try {
    b.height_upper = height_upper_bound(H, circumradius, a);
  } catch (const BoundUndefined&) {
  }
  if (H >= -1.0 && H < 0.0)
    b.window_R2 = existence_window(H);
  return b;
}

} // namespace hcmc
