#include "hcmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace hcmc {

double Mesh::signed_area(const Triangle& t) const {
  const Vec2& a = vertices[t[0]];
  const Vec2 ab = vertices[t[1]] - a, ac = vertices[t[2]] - a;
  return 0.5 * (ab.x() * ac.y() - ab.y() * ac.x());
}

double Mesh::max_edge_length() const {
  double longest = 0.0;
  for (const Triangle& t : triangles)
    for (int k = 0; k < 3; ++k)
      longest = std::max(longest, (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm());
  return longest;
}

std::vector<std::vector<int>> Mesh::vertex_neighbors() const {
  std::vector<std::vector<int>> adj(vertices.size());
  for (const Triangle& t : triangles)
    for (int k = 0; k < 3; ++k) {
      adj[t[k]].push_back(t[(k + 1) % 3]);
      adj[t[k]].push_back(t[(k + 2) % 3]);
    }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

namespace {

// Boundary parameters at equal arc length, starting from t = 0.
std::vector<double> arc_length_params(const DomainSpec& domain, std::size_t count) {
  const std::size_t fine = std::max<std::size_t>(16384, 32 * count);
  const double T = domain.period();
  std::vector<double> cumulative(fine + 1, 0.0);
  double prev_speed = domain.derivative(0.0).norm();
  for (std::size_t i = 1; i <= fine; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(fine);
    const double speed = domain.derivative(t).norm();
    cumulative[i] = cumulative[i - 1] + 0.5 * (prev_speed + speed) * T / static_cast<double>(fine);
    prev_speed = speed;
  }
  const double total = cumulative.back();
  std::vector<double> params(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count);
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t j = std::max<std::size_t>(1, static_cast<std::size_t>(it - cumulative.begin()));
    const double s0 = cumulative[j - 1], s1 = cumulative[j];
    const double frac = s1 > s0 ? (target - s0) / (s1 - s0) : 0.0;
    params[k] = T * (static_cast<double>(j - 1) + frac) / static_cast<double>(fine);
  }
  params[0] = 0.0;
  return params;
}

// Signed distance to a counterclockwise convex polygon (positive inside).
double inside_distance(std::span<const Vec2> polygon, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& a = polygon[i];
    const Vec2 e = polygon[(i + 1) % polygon.size()] - a;
    const Vec2 w = p - a;
    d = std::min(d, (e.x() * w.y() - e.y() * w.x()) / e.norm());
  }
  return d;
}

} // namespace

Mesh triangulate(const DomainSpec& domain, double h, const MeshOptions& options) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("mesh size h must be positive");
  if (!(h < domain.diameter() / 4.0))
    throw std::invalid_argument("mesh size h must be below diameter/4");

  const auto boundary_count = std::max<std::size_t>(
      12, static_cast<std::size_t>(std::ceil(domain.perimeter() / h)));
  const double estimate = domain.area() / (0.5 * std::sqrt(3.0) * h * h) +
                          static_cast<double>(boundary_count);
  if (estimate > static_cast<double>(options.max_vertices)) {
    std::ostringstream msg;
    msg << "mesh size h = " << h << " needs about " << static_cast<long long>(estimate)
        << " vertices, over the budget of " << options.max_vertices;
    throw MeshError(msg.str());
  }

  Mesh mesh;
  mesh.h = h;
  const std::vector<double> params = arc_length_params(domain, boundary_count);
  for (double t : params) {
    mesh.vertices.push_back(domain.point(t));
    mesh.boundary.push_back(1);
    mesh.boundary_param.push_back(t);
    mesh.boundary_loop.push_back(static_cast<int>(mesh.boundary_loop.size()));
  }
  const std::vector<Vec2> polygon(mesh.vertices);

  Vec2 lo = polygon[0], hi = polygon[0];
  for (const Vec2& p : polygon) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::mt19937 rng(7919u);
  std::uniform_real_distribution<double> jitter(-0.05 * h, 0.05 * h);
  const double row = 0.5 * std::sqrt(3.0) * h;

  // Boundary-fitted layer: one vertex per boundary chord, a row height inward
  // from the chord midpoint, so the elements along the boundary are regular.
  std::vector<Vec2> layer;
  for (std::size_t k = 0; k < boundary_count; ++k) {
    const Vec2& p0 = polygon[k];
    const Vec2& p1 = polygon[(k + 1) % boundary_count];
    const Vec2 e = p1 - p0;
    const Vec2 p = 0.5 * (p0 + p1) + row * Vec2(-e.y(), e.x()) / e.norm();
    if (inside_distance(polygon, p) < 0.6 * row)
      continue;
    if (!layer.empty() && (p - layer.back()).norm() < 0.5 * h)
      continue;
    if (layer.size() > 1 && (p - layer.front()).norm() < 0.5 * h)
      continue;
    layer.push_back(p);
  }
  for (const Vec2& p : layer) {
    mesh.vertices.push_back(p);
    mesh.boundary.push_back(0);
    mesh.boundary_param.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  const double clearance = row + 0.6 * h;
  int row_index = 0;
  for (double y = lo.y() + 0.5 * row; y < hi.y(); y += row, ++row_index) {
    const double shift = (row_index % 2 == 0) ? 0.0 : 0.5 * h;
    for (double x = lo.x() + shift; x < hi.x(); x += h) {
      const Vec2 p(x + jitter(rng), y + jitter(rng));
      if (inside_distance(polygon, p) >= clearance) {
        mesh.vertices.push_back(p);
        mesh.boundary.push_back(0);
        mesh.boundary_param.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }

  mesh.triangles = delaunay_triangulate(mesh.vertices);
  for (int pass = 0; pass < options.smoothing_passes; ++pass) {
    const auto adj = mesh.vertex_neighbors();
    std::vector<Vec2> moved(mesh.vertices);
    for (std::size_t v = boundary_count; v < mesh.vertices.size(); ++v) {
      if (adj[v].empty())
        continue;
      Vec2 mean = Vec2::Zero();
      for (int w : adj[v])
        mean += mesh.vertices[w];
      moved[v] = mean / static_cast<double>(adj[v].size());
    }
    mesh.vertices = std::move(moved);
    mesh.triangles = delaunay_triangulate(mesh.vertices);
  }

  // Boundary chords must all be mesh edges and every vertex must be used.
  std::set<std::pair<int, int>> edges;
  std::vector<int> used(mesh.vertices.size(), 0);
  for (const Triangle& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      edges.emplace(t[k], t[(k + 1) % 3]);
      used[t[k]] = 1;
    }
  for (std::size_t i = 0; i < boundary_count; ++i) {
    const int a = static_cast<int>(i), b = static_cast<int>((i + 1) % boundary_count);
    if (!edges.contains({a, b}))
      throw MeshError("triangulation lost a boundary edge");
  }
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw MeshError("triangulation dropped a vertex");
  return mesh;
}

Mesh permute_vertices(const Mesh& mesh, std::span<const int> perm) {
  const std::size_t n = mesh.vertices.size();
  if (perm.size() != n)
    throw std::invalid_argument("permutation size mismatch");
  Mesh out;
  out.h = mesh.h;
  out.vertices.resize(n);
  out.boundary.resize(n);
  out.boundary_param.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(perm[i]);
    out.vertices[j] = mesh.vertices[i];
    out.boundary[j] = mesh.boundary[i];
    out.boundary_param[j] = mesh.boundary_param[i];
  }
  for (const Triangle& t : mesh.triangles)
    out.triangles.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
  for (int v : mesh.boundary_loop)
    out.boundary_loop.push_back(perm[v]);
  return out;
}

} // namespace hcmc
