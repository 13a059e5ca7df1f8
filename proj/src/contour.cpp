#include "hcmc/contour.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace hcmc {

namespace {

using EdgeKey = std::uint64_t;

EdgeKey edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

} // namespace

std::vector<Polyline> level_set(const Mesh& mesh, std::span<const double> values, double level) {
  if (values.size() != mesh.vertex_count())
    throw std::invalid_argument("field size does not match the mesh");

  std::map<EdgeKey, int> edge_uses;
  for (const Triangle& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      ++edge_uses[edge_key(t[k], t[(k + 1) % 3])];

  // Crossing points live on edges; segments join two crossed edges.
  std::map<EdgeKey, Vec2> crossing;
  std::map<EdgeKey, std::vector<EdgeKey>> links;
  for (const Triangle& t : mesh.triangles) {
    std::vector<EdgeKey> crossed;
    for (int k = 0; k < 3; ++k) {
      const int p = t[k], q = t[(k + 1) % 3];
      const bool up_p = values[p] >= level, up_q = values[q] >= level;
      if (up_p == up_q)
        continue;
      const EdgeKey key = edge_key(p, q);
      crossed.push_back(key);
      if (!crossing.contains(key)) {
        const double s = (level - values[p]) / (values[q] - values[p]);
        crossing[key] = mesh.vertices[p] + s * (mesh.vertices[q] - mesh.vertices[p]);
      }
    }
    if (crossed.size() == 2) {
      links[crossed[0]].push_back(crossed[1]);
      links[crossed[1]].push_back(crossed[0]);
    }
  }

  std::vector<Polyline> lines;
  std::map<EdgeKey, bool> visited;
  auto trace = [&](EdgeKey start) {
    Polyline line;
    EdgeKey prev = start, cur = start;
    visited[cur] = true;
    line.points.push_back(crossing[cur]);
    while (true) {
      EdgeKey next = cur;
      bool found = false;
      for (EdgeKey cand : links[cur])
        if (!visited[cand]) {
          next = cand;
          found = true;
          break;
        }
      if (!found) {
        // Closed when the walk returns next to its start.
        const auto& around = links[cur];
        line.closed = cur != start && prev != start &&
                      std::find(around.begin(), around.end(), start) != around.end();
        break;
      }
      prev = cur;
      cur = next;
      visited[cur] = true;
      line.points.push_back(crossing[cur]);
    }
    if (line.closed)
      line.points.push_back(line.points.front());
    else
      line.boundary_ends = (edge_uses[start] == 1) + (edge_uses[cur] == 1 && cur != start);
    lines.push_back(std::move(line));
  };

  // Open polylines first (start from an end), then closed loops.
  for (const auto& [key, nbrs] : links)
    if (nbrs.size() == 1 && !visited[key])
      trace(key);
  for (const auto& [key, nbrs] : links)
    if (!visited[key])
      trace(key);
  return lines;
}

} // namespace hcmc
