#pragma once

// Flat-file formats: vertex fields as CSV, theorem reports and solver
// diagnostics as JSON.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hcmc/analysis.hpp"
#include "hcmc/solver.hpp"

namespace hcmc {

class CsvError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe text with 17 significant digits.
std::string format_number(double x);

struct ExtraColumn {
  std::string name;
  std::span<const double> values;
};

/// Columns x,y,u,|Du|,boundary_flag (plus an optional extra column); header
/// row, LF line endings.
void write_field_csv(std::ostream& out, const Mesh& mesh, std::span<const double> u,
                     std::span<const double> grad_norm,
                     const std::optional<ExtraColumn>& extra = std::nullopt);

void write_solution_csv(std::ostream& out, const SolutionField& s);

/// A field file read back: vertex coordinates, boundary flags and every
/// numeric column by name.
struct FieldTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<Vec2> points;
  std::vector<std::uint8_t> boundary;

  const std::vector<double>& column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

/// Throws CsvError (with the line number) on malformed input or an empty field.
FieldTable read_field_csv(std::istream& in);

nlohmann::json to_json(const TheoremReport& report);
nlohmann::json report_json(std::span<const TheoremReport> reports);
nlohmann::json diagnostics_json(const SolutionField& s);

} // namespace hcmc
