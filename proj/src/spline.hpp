#pragma once

#include <span>
#include <vector>

namespace hcmc {

// Periodic C2 cubic spline through (knots[i], values[i]) with period
// `period`; knots must be strictly increasing in [0, period).
class PeriodicSpline {
public:
  PeriodicSpline(std::vector<double> knots, std::vector<double> values,
                 double period);

  double value(double t) const;
  double first(double t) const;
  double second(double t) const;
  double period() const { return period_; }

private:
  struct Local {
    std::size_t i;
    double h, left, right; // left = t - t_i, right = t_{i+1} - t
  };
  Local locate(double t) const;
  double y(std::size_t i) const { return values_[i % values_.size()]; }
  double m(std::size_t i) const { return moments_[i % moments_.size()]; }

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> moments_; // second derivatives at the knots
  double period_;
};

} // namespace hcmc
