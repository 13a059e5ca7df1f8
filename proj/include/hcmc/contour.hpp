#pragma once

#include <span>
#include <vector>

#include "hcmc/mesh.hpp"

namespace hcmc {

/// One connected piece of a level set of a piecewise-linear field.
struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
  int boundary_ends = 0; // open ends lying on boundary edges (0, 1 or 2)
};

/// Level set {f = level} of the vertex-interpolated field, split into
/// connected polylines. Vertices with f >= level count as above the level,
/// so every crossed triangle contributes exactly one segment.
std::vector<Polyline> level_set(const Mesh& mesh, std::span<const double> values, double level);

} // namespace hcmc
