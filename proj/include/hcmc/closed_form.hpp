#pragma once

// Exact radial solutions and the explicit a priori bounds for the
// hyperbolic CMC graph equation
//
//   div(Du / W) + (2 / u) (1 / W - H) = 0,   W = sqrt(1 + |Du|^2),
//
// with Dirichlet data u = a.

#include <optional>
#include <stdexcept>

namespace hcmc {

/// A bound whose hypotheses fail for the given data.
class BoundUndefined : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Euclidean spherical cap w(r) = c0 + sqrt(m^2 - r^2) over the disc of
/// radius R, with w(R) = a. It is an exact graph of constant hyperbolic mean
/// curvature H.
struct RadialCap {
  double H = 0.0;
  double R = 0.0;
  double a = 1.0;
  double m = 0.0;  // sphere radius
  double c0 = 0.0; // centre height, -m H

  double height(double r) const;
  double slope(double r) const;     // w'(r)
  double curvature(double r) const; // w''(r)
  double top() const { return c0 + m; }
  /// |Dw| at the rim, R / sqrt(m^2 - R^2).
  double rim_slope() const;
};

/// Throws BoundUndefined when no cap with m > R exists (H <= -a/R).
RadialCap radial_cap(double H, double R, double a = 1.0);

/// Largest admissible squared circumradius (for a = 1) in the existence
/// window; defined for -1 <= H < 0.
double existence_window(double H);

/// C = u_M^2 / ((1 - H) a^2).
double gradient_constant(double H, double u_max, double a);

/// sqrt(C^2 - (1 + H C)^2) / (1 + H C). Throws BoundUndefined when
/// 1 + H C <= 0, which for H < 0 is u_max >= sqrt((H - 1)/H) a.
double gradient_bound(double H, double u_max, double a);

/// sqrt(1 - H^2) / H for 0 < H < 1, +infinity otherwise.
double tilt_slope_bound(double H);

/// (1 - H) / kappa_max.
double height_lower_bound(double H, double kappa_max);

/// m (1 - H) of the cap over the circumscribed disc.
double height_upper_bound(double H, double R, double a = 1.0);

/// Every bound evaluated for one configuration. Entries whose hypotheses
/// fail are empty.
struct BoundSet {
  double C = 0.0;
  std::optional<double> gradient;
  double tilt = 0.0; // may be +infinity
  double height_lower = 0.0;
  std::optional<double> height_upper;
  std::optional<double> window_R2;
};

BoundSet evaluate_bounds(double H, double a, double u_max, double kappa_max,
                         double circumradius);

} // namespace hcmc
