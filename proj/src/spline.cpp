#include "spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace hcmc {

PeriodicSpline::PeriodicSpline(std::vector<double> knots,
                               std::vector<double> values, double period)
    : knots_(std::move(knots)), values_(std::move(values)), period_(period) {
  const std::size_t n = knots_.size();
  if (n < 3 || values_.size() != n)
    throw std::invalid_argument("periodic spline needs at least 3 knots");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(knots_[i + 1] > knots_[i]))
      throw std::invalid_argument("spline knots must be strictly increasing");
  if (!(period_ > knots_.back() - knots_.front()))
    throw std::invalid_argument("spline period too short");

  auto step = [&](std::size_t i) {
    return i + 1 < n ? knots_[i + 1] - knots_[i]
                     : period_ - knots_[n - 1] + knots_[0];
  };

  // Cyclic tridiagonal system for the knot moments.
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(3 * n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    const double hp = step(prev);
    const double hn = step(i);
    const auto r = static_cast<int>(i);
    entries.emplace_back(r, static_cast<int>(prev), hp);
    entries.emplace_back(r, r, 2.0 * (hp + hn));
    entries.emplace_back(r, static_cast<int>(next), hn);
    rhs[r] = 6.0 * ((values_[next] - values_[i]) / hn -
                    (values_[i] - values_[prev]) / hp);
  }
  Eigen::SparseMatrix<double> system(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n));
  system.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(system);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("periodic spline system is singular");
  const Eigen::VectorXd moments = lu.solve(rhs);
  moments_.assign(moments.data(), moments.data() + moments.size());
}

PeriodicSpline::Local PeriodicSpline::locate(double t) const {
  double s = std::fmod(t - knots_.front(), period_);
  if (s < 0.0)
    s += period_;
  s += knots_.front();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  const std::size_t i =
      it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double upper =
      i + 1 < knots_.size() ? knots_[i + 1] : knots_.front() + period_;
  return {i, upper - knots_[i], s - knots_[i], upper - s};
}

double PeriodicSpline::value(double t) const {
  const auto [i, h, l, r] = locate(t);
  return m(i) * r * r * r / (6 * h) + m(i + 1) * l * l * l / (6 * h) +
         (y(i) / h - m(i) * h / 6) * r + (y(i + 1) / h - m(i + 1) * h / 6) * l;
}

double PeriodicSpline::first(double t) const {
  const auto [i, h, l, r] = locate(t);
  return -m(i) * r * r / (2 * h) + m(i + 1) * l * l / (2 * h) -
         (y(i) / h - m(i) * h / 6) + (y(i + 1) / h - m(i + 1) * h / 6);
}

double PeriodicSpline::second(double t) const {
  const auto [i, h, l, r] = locate(t);
  return (m(i) * r + m(i + 1) * l) / h;
}

} // namespace hcmc
