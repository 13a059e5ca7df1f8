#include "hcmc/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hcmc/analysis.hpp"
#include "hcmc/contour.hpp"
#include "hcmc/solver.hpp"

#ifndef HCMC_VERSION
#define HCMC_VERSION "1.0.0"
#endif

namespace hcmc::cli {

std::string svg_generator_comment() { return "<!-- generator: hcmc " HCMC_VERSION " -->"; }

std::vector<double> contour_levels(std::span<const double> values, int count) {
  if (values.empty())
    throw std::invalid_argument("empty field");
  if (count < 1)
    throw std::invalid_argument("need at least one contour level");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*hi - *lo > 1e-14 * std::max(1.0, std::abs(*hi))))
    throw DegenerateField("field is constant; no contour levels");
  std::vector<double> levels(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    levels[static_cast<std::size_t>(k)] = *lo + (*hi - *lo) * (k + 1) / (count + 1);
  return levels;
}

Mesh mesh_from_table(const FieldTable& table) {
  if (table.points.size() < 3)
    throw CsvError("field needs at least three points");
  Mesh mesh;
  mesh.vertices = table.points;
  mesh.boundary = table.boundary;
  mesh.boundary_param.assign(mesh.vertices.size(), std::nan(""));
  mesh.triangles = delaunay_triangulate(mesh.vertices);

  Vec2 centre = Vec2::Zero();
  std::vector<int> loop;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (mesh.boundary[v]) {
      loop.push_back(static_cast<int>(v));
      centre += mesh.vertices[v];
    }
  if (!loop.empty())
    centre /= static_cast<double>(loop.size());
  auto angle = [&](int v) {
    const Vec2 d = mesh.vertices[static_cast<std::size_t>(v)] - centre;
    return std::atan2(d.y(), d.x());
  };
  std::stable_sort(loop.begin(), loop.end(), [&](int p, int q) { return angle(p) < angle(q); });
  mesh.boundary_loop = std::move(loop);

  double total = 0.0;
  for (const Triangle& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k)
      total += (mesh.vertices[t[k]] - mesh.vertices[t[(k + 1) % 3]]).norm();
  }
  mesh.h = mesh.triangles.empty() ? 0.0 : total / (3.0 * mesh.triangles.size());
  return mesh;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

// Blue to red through white.
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double s = t / 0.5;
    r = static_cast<int>(std::lround(40 + s * 180));
    g = static_cast<int>(std::lround(80 + s * 140));
    b = 200;
  } else {
    const double s = (t - 0.5) / 0.5;
    r = 220;
    g = static_cast<int>(std::lround(220 - s * 170));
    b = static_cast<int>(std::lround(200 - s * 160));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

} // namespace

std::string render_svg(const Mesh& mesh, std::span<const double> values, const PlotSpec& spec) {
  if (mesh.vertices.empty())
    throw std::invalid_argument("empty mesh");
  Vec2 lo = mesh.vertices.front(), hi = lo;
  for (const Vec2& p : mesh.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double margin = 20.0, header = spec.title.empty() ? 0.0 : 24.0;
  const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double scale = (spec.width - 2.0 * margin) / (extent > 0.0 ? extent : 1.0);
  const double height = (hi.y() - lo.y()) * scale + 2.0 * margin + header;
  auto px = [&](const Vec2& p) {
    return num(margin + (p.x() - lo.x()) * scale) + "," +
           num(header + margin + (hi.y() - p.y()) * scale);
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" << svg_generator_comment() << '\n';
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << spec.width << ' ' << num(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    out << "<text x=\"" << num(margin) << "\" y=\"18\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << escape(spec.title) << "</text>\n";

  if (!mesh.boundary_loop.empty()) {
    out << "<polygon fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < mesh.boundary_loop.size(); ++k)
      out << (k ? " " : "") << px(mesh.vertices[static_cast<std::size_t>(mesh.boundary_loop[k])]);
    out << "\"/>\n";
  }

  const double lmin = spec.levels.empty() ? 0.0 : spec.levels.front();
  const double lmax = spec.levels.empty() ? 1.0 : spec.levels.back();
  for (double level : spec.levels) {
    const double t = lmax > lmin ? (level - lmin) / (lmax - lmin) : 0.5;
    out << "<g class=\"contour\" data-level=\"" << format_number(level) << "\" stroke=\""
        << colour(t) << "\" stroke-width=\"" << (level == 0.0 ? "2" : "1")
        << "\" fill=\"none\">\n";
    for (const Polyline& line : level_set(mesh, values, level)) {
      out << (line.closed ? "<polygon" : "<polyline") << " points=\"";
      for (std::size_t k = 0; k < line.points.size(); ++k)
        out << (k ? " " : "") << px(line.points[k]);
      out << "\"/>\n";
    }
    out << "</g>\n";
  }

  for (const Vec2& m : spec.marks) {
    const std::string xy = px(m);
    const auto comma = xy.find(',');
    out << "<circle class=\"critical-point\" cx=\"" << xy.substr(0, comma) << "\" cy=\""
        << xy.substr(comma + 1) << "\" r=\"4\" fill=\"red\" stroke=\"black\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_contours(const FieldTable& table, std::string_view column,
                            std::span<const double> levels, int auto_levels) {
  const std::vector<double>& values = table.column(column);
  const Mesh mesh = mesh_from_table(table);
  PlotSpec spec;
  spec.title = std::string(column);
  spec.levels = levels.empty() ? contour_levels(values, auto_levels)
                               : std::vector<double>(levels.begin(), levels.end());
  std::sort(spec.levels.begin(), spec.levels.end());
  if (table.has_column("u")) {
    const std::vector<double>& u = table.column("u");
    const GradientField g = gradient_field(mesh, u);
    const double gmax = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    if (gmax > 0.0)
      for (const CriticalPoint& p : find_critical_points(mesh, u, 0.25 * gmax).points)
        spec.marks.push_back(p.position);
  }
  return render_svg(mesh, values, spec);
}

} // namespace hcmc::cli
