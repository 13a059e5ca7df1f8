#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hcmc/mesh.hpp"

namespace hcmc {

namespace {

struct DTri {
  std::array<int, 3> v;
  std::array<int, 3> n; // n[i]: neighbour across the edge opposite v[i]
  bool alive = true;
};

long double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = static_cast<long double>(b.x()) - a.x();
  const long double aby = static_cast<long double>(b.y()) - a.y();
  const long double acx = static_cast<long double>(c.x()) - a.x();
  const long double acy = static_cast<long double>(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// Positive when d lies strictly inside the circumcircle of ccw (a, b, c).
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = static_cast<long double>(a.x()) - d.x();
  const long double ady = static_cast<long double>(a.y()) - d.y();
  const long double bdx = static_cast<long double>(b.x()) - d.x();
  const long double bdy = static_cast<long double>(b.y()) - d.y();
  const long double cdx = static_cast<long double>(c.x()) - d.x();
  const long double cdy = static_cast<long double>(c.y()) - d.y();
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

class Builder {
public:
  explicit Builder(std::vector<Vec2> pts) : pts_(std::move(pts)) {}

  std::vector<Triangle> run(std::size_t real_count) {
    Vec2 lo = pts_[0], hi = pts_[0];
    for (std::size_t i = 0; i < real_count; ++i) {
      lo = lo.cwiseMin(pts_[i]);
      hi = hi.cwiseMax(pts_[i]);
    }
    const Vec2 mid = 0.5 * (lo + hi);
    const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
    const double far = 1e3 * extent;
    const int s0 = static_cast<int>(pts_.size());
    pts_.push_back(mid + Vec2(-far, -far));
    pts_.push_back(mid + Vec2(far, -far));
    pts_.push_back(mid + Vec2(0.0, far));
    tris_.push_back({{s0, s0 + 1, s0 + 2}, {-1, -1, -1}, true});
    last_ = 0;

    for (int idx : insertion_order(real_count))
      insert(idx);

    std::vector<Triangle> out;
    for (const DTri& t : tris_) {
      if (!t.alive || t.v[0] >= s0 || t.v[1] >= s0 || t.v[2] >= s0)
        continue;
      out.push_back(t.v);
    }
    return out;
  }

private:
  // Row-serpentine order keeps walks short.
  std::vector<int> insertion_order(std::size_t count) const {
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    Vec2 lo = pts_[0], hi = pts_[0];
    for (std::size_t i = 0; i < count; ++i) {
      lo = lo.cwiseMin(pts_[i]);
      hi = hi.cwiseMax(pts_[i]);
    }
    const int bands = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(count) / 4.0)));
    const double span_y = std::max(hi.y() - lo.y(), 1e-300);
    auto band = [&](int i) {
      return std::min(bands - 1, static_cast<int>((pts_[i].y() - lo.y()) / span_y * bands));
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const int ba = band(a), bb = band(b);
      if (ba != bb)
        return ba < bb;
      return (ba % 2 == 0) ? pts_[a].x() < pts_[b].x() : pts_[a].x() > pts_[b].x();
    });
    return order;
  }

  int locate(const Vec2& p) const {
    int t = last_;
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const DTri& tri = tris_[static_cast<std::size_t>(t)];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + static_cast<int>(step)) % 3;
        const Vec2& a = pts_[tri.v[(i + 1) % 3]];
        const Vec2& b = pts_[tri.v[(i + 2) % 3]];
        if (orient(a, b, p) < 0 && tri.n[i] >= 0) {
          t = tri.n[i];
          moved = true;
          break;
        }
      }
      if (!moved)
        return t;
    }
    // Walk failed to settle; fall back to a scan.
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const DTri& tri = tris_[i];
      if (tri.alive && incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0)
        return static_cast<int>(i);
    }
    throw MeshError("delaunay: point location failed");
  }

  bool in_circle(int t, const Vec2& p) const {
    const DTri& tri = tris_[static_cast<std::size_t>(t)];
    return incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0;
  }

  void insert(int pi) {
    const Vec2& p = pts_[static_cast<std::size_t>(pi)];
    const int seed = locate(p);
    for (int k = 0; k < 3; ++k)
      if ((pts_[tris_[seed].v[k]] - p).squaredNorm() == 0.0)
        throw MeshError("delaunay: duplicate point");

    bad_.clear();
    bad_.push_back(seed);
    tris_[seed].alive = false;
    for (std::size_t q = 0; q < bad_.size(); ++q) {
      for (int nb : tris_[bad_[q]].n) {
        if (nb < 0 || !tris_[nb].alive)
          continue;
        if (in_circle(nb, p)) {
          tris_[nb].alive = false;
          bad_.push_back(nb);
        }
      }
    }

    edges_.clear();
    for (int t : bad_) {
      const DTri& tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.n[i];
        if (nb >= 0 && !tris_[nb].alive)
          continue;
        edges_.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb, t});
      }
    }

    const int first = static_cast<int>(tris_.size());
    for (const auto& [a, b, outer, old] : edges_) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{a, b, pi}, {-1, -1, outer}, true});
      if (outer >= 0)
        for (int& slot : tris_[outer].n)
          if (slot == old)
            slot = id;
    }
    const int last = static_cast<int>(tris_.size());
    for (int t = first; t < last; ++t) {
      const int a = tris_[t].v[0], b = tris_[t].v[1];
      for (int s = first; s < last; ++s) {
        if (tris_[s].v[0] == b)
          tris_[t].n[0] = s;
        if (tris_[s].v[1] == a)
          tris_[t].n[1] = s;
      }
    }
    last_ = last - 1;
  }

  struct CavityEdge {
    int a, b, outer, old;
  };

  std::vector<Vec2> pts_;
  std::vector<DTri> tris_;
  std::vector<int> bad_;
  std::vector<CavityEdge> edges_;
  int last_ = 0;
};

} // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Vec2> points) {
  if (points.size() < 3)
    throw MeshError("delaunay: need at least three points");
  Builder builder(std::vector<Vec2>(points.begin(), points.end()));
  auto tris = builder.run(points.size());
  for (const Triangle& t : tris)
    if (!(orient(points[t[0]], points[t[1]], points[t[2]]) > 0))
      throw MeshError("delaunay: produced a degenerate triangle");
  return tris;
}

} // namespace hcmc
