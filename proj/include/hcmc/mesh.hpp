#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcmc/geometry.hpp"

namespace hcmc {

using Triangle = std::array<int, 3>;

/// Raised when a mesh cannot be produced within the configured budget.
class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Conforming linear triangulation of a domain. Triangles are counterclockwise.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::uint8_t> boundary;  // 1 on the boundary curve
  std::vector<double> boundary_param;  // curve parameter, NaN for interior
  std::vector<int> boundary_loop;      // boundary vertices, counterclockwise
  double h = 0.0;

  std::size_t vertex_count() const { return vertices.size(); }
  bool is_boundary(int v) const { return boundary[static_cast<std::size_t>(v)] != 0; }
  double signed_area(const Triangle& t) const;
  double max_edge_length() const;

  /// Sorted one-ring vertex neighbours.
  std::vector<std::vector<int>> vertex_neighbors() const;
};

struct MeshOptions {
  std::size_t max_vertices = 2'000'000;
  int smoothing_passes = 4;
};

/// Boundary-conforming Delaunay mesh with target edge length h: boundary
/// vertices are placed at equal arc length on the curve, interior vertices
/// start from a jittered hexagonal lattice and are Laplace-smoothed.
Mesh triangulate(const DomainSpec& domain, double h, const MeshOptions& options = {});

/// Delaunay triangulation of the convex hull of a point set (Bowyer-Watson).
std::vector<Triangle> delaunay_triangulate(std::span<const Vec2> points);

/// Relabels vertices: vertex i of the input becomes vertex perm[i].
Mesh permute_vertices(const Mesh& mesh, std::span<const int> perm);

} // namespace hcmc
