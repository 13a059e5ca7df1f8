#include "hcmc/field_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace hcmc {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_field_csv(std::ostream& out, const Mesh& mesh, std::span<const double> u,
                     std::span<const double> grad_norm, const std::optional<ExtraColumn>& extra) {
  const std::size_t n = mesh.vertex_count();
  if (u.size() != n || grad_norm.size() != n || (extra && extra->values.size() != n))
    throw std::invalid_argument("field columns do not match the mesh");
  out << "x,y,u,|Du|,boundary_flag";
  if (extra)
    out << ',' << extra->name;
  out << '\n';
  for (std::size_t v = 0; v < n; ++v) {
    out << format_number(mesh.vertices[v].x()) << ',' << format_number(mesh.vertices[v].y())
        << ',' << format_number(u[v]) << ',' << format_number(grad_norm[v]) << ','
        << (mesh.boundary[v] ? 1 : 0);
    if (extra)
      out << ',' << format_number(extra->values[v]);
    out << '\n';
  }
}

void write_solution_csv(std::ostream& out, const SolutionField& s) {
  const GradientField g = gradient_field(s);
  write_field_csv(out, *s.mesh, s.u, g.magnitude);
}

const std::vector<double>& FieldTable::column(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw CsvError("field has no column '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

bool FieldTable::has_column(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ','))
    cells.push_back(cell);
  if (!line.empty() && line.back() == ',')
    cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& text, int line_no, std::string_view column) {
  std::string_view s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw CsvError("line " + std::to_string(line_no) + ": column '" + std::string(column) +
                   "': not a number: '" + text + "'");
  return value;
}

} // namespace

FieldTable read_field_csv(std::istream& in) {
  FieldTable table;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw CsvError("empty field file");
  ++line_no;
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  table.names = split(line);
  for (std::string_view required : {"x", "y", "boundary_flag"})
    if (std::find(table.names.begin(), table.names.end(), required) == table.names.end())
      throw CsvError("line 1: missing required column '" + std::string(required) + "'");
  table.columns.resize(table.names.size());

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != table.names.size())
      throw CsvError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(table.names.size()) + " columns, found " +
                     std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c)
      table.columns[c].push_back(parse_cell(cells[c], line_no, table.names[c]));
  }
  const auto& xs = table.column("x");
  if (xs.empty())
    throw CsvError("field file has no data rows");
  const auto& ys = table.column("y");
  const auto& flags = table.column("boundary_flag");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    table.points.emplace_back(xs[i], ys[i]);
    if (flags[i] != 0.0 && flags[i] != 1.0)
      throw CsvError("line " + std::to_string(i + 2) + ": boundary_flag must be 0 or 1");
    table.boundary.push_back(flags[i] != 0.0 ? 1 : 0);
  }
  return table;
}

namespace {

nlohmann::json number_or_null(std::optional<double> x) {
  if (!x || !std::isfinite(*x))
    return nullptr;
  return *x;
}

} // namespace

nlohmann::json to_json(const TheoremReport& report) {
  return {{"theorem_id", std::string(to_string(report.id))},
          {"status", std::string(to_string(report.status))},
          {"margin", number_or_null(report.margin)},
          {"details", report.details}};
}

nlohmann::json report_json(std::span<const TheoremReport> reports) {
  nlohmann::json doc = nlohmann::json::array();
  for (const TheoremReport& r : reports)
    doc.push_back(to_json(r));
  return doc;
}

nlohmann::json diagnostics_json(const SolutionField& s) {
  const auto& d = s.diagnostics;
  const GradientField g = gradient_field(s);
  return {{"H", s.H},
          {"a", s.a},
          {"h", s.mesh->h},
          {"vertices", s.mesh->vertex_count()},
          {"triangles", s.mesh->triangles.size()},
          {"converged", d.converged},
          {"newton_iterations", d.newton_iterations},
          {"continuation_steps", d.continuation_steps},
          {"stage_iterations", d.stage_iterations},
          {"tau_reached", d.tau_reached},
          {"residual_norm", number_or_null(d.residual_norm)},
          {"u_max", s.max_value()},
          {"max_grad", *std::max_element(g.magnitude.begin(), g.magnitude.end())}};
}

} // namespace hcmc
