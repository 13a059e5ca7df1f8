#pragma once

// SVG contour plots of vertex fields on triangulations.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/field_io.hpp"
#include "hcmc/mesh.hpp"

namespace hcmc::cli {

/// First line after the XML declaration of every generated SVG. It carries
/// the generator version and is the only line allowed to differ between
/// builds for identical input.
std::string svg_generator_comment();

/// `count` equally spaced values strictly between min and max.
/// Throws DegenerateField for a constant field.
std::vector<double> contour_levels(std::span<const double> values, int count);

/// Delaunay triangulation of the table's points, boundary flags taken from
/// the boundary_flag column and the boundary loop ordered by angle.
Mesh mesh_from_table(const FieldTable& table);

struct PlotSpec {
  std::vector<double> levels;
  std::vector<Vec2> marks; // drawn as red discs (critical points)
  std::string title;
  int width = 640;
};

std::string render_svg(const Mesh& mesh, std::span<const double> values, const PlotSpec& spec);

/// Plots one column of a field table. With no explicit levels, `auto_levels`
/// equispaced ones are used. Critical points of the u column, when present,
/// are marked.
std::string render_contours(const FieldTable& table, std::string_view column,
                            std::span<const double> levels, int auto_levels = 12);

} // namespace hcmc::cli
