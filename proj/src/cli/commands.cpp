#include "hcmc/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "hcmc/analysis.hpp"
#include "hcmc/closed_form.hpp"
#include "hcmc/cli/svg.hpp"
#include "hcmc/field_io.hpp"

namespace hcmc::cli {

namespace fs = std::filesystem;

ExperimentConfig apply_overrides(ExperimentConfig cfg, const Overrides& o) {
  if (o.out_dir)
    cfg.out_dir = *o.out_dir;
  if (o.formats)
    cfg.formats = *o.formats;
  if (o.h) {
    if (!(*o.h > 0.0))
      throw ConfigError("--h must be positive");
    cfg.h = {*o.h};
  }
  return cfg;
}

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  if (!out)
    throw fs::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

void require_single(const ExperimentConfig& cfg, const char* command) {
  auto single = [&](std::size_t n, const char* what) {
    if (n != 1)
      throw ConfigError(std::string(command) + " needs a single " + what + "; use sweep for lists");
  };
  single(cfg.H.size(), "H");
  single(cfg.h.size(), "mesh size h");
  if (cfg.domain.kind == DomainKind::disc)
    single(cfg.domain.radii.size(), "disc radius");
}

std::string field_svg(const SolutionField& s, std::span<const double> values, std::string title,
                      bool mark_critical) {
  PlotSpec spec;
  spec.title = std::move(title);
  try {
    spec.levels = contour_levels(values, 12);
  } catch (const DegenerateField&) {
  }
  if (mark_critical) {
    const GradientField g = gradient_field(s);
    const double gmax = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    if (gmax > 0.0)
      for (const CriticalPoint& p : find_critical_points(s, 0.25 * gmax).points)
        spec.marks.push_back(p.position);
  }
  return render_svg(*s.mesh, values, spec);
}

struct Solved {
  std::optional<SolutionField> field;
  int code = exit_ok;
};

/// Solves the single configured case and writes the solution artifacts.
Solved solve_and_write(const ExperimentConfig& cfg, const DomainSpec& domain, std::ostream& log) {
  const double H = cfg.H.front(), h = cfg.h.front();
  auto mesh = std::make_shared<const Mesh>(triangulate(domain, h));
  log << "mesh: " << mesh->vertex_count() << " vertices, " << mesh->triangles.size()
      << " triangles (h = " << h << ")\n";
  Solved out;
  try {
    out.field = solve_dirichlet(mesh, domain, H, cfg.a, cfg.solver);
  } catch (const SolveFailure& e) {
    log << "error: " << e.what() << '\n';
    if (cfg.formats & json) {
      nlohmann::json diag = diagnostics_json(e.last_iterate());
      diag["converged"] = false;
      diag["message"] = e.what();
      write_json(cfg.out_dir / "diagnostics.json", diag);
    }
    out.code = exit_nonconvergence;
    return out;
  }
  const SolutionField& s = *out.field;
  const auto& d = s.diagnostics;
  log << "converged: " << d.newton_iterations << " Newton iterations over "
      << d.continuation_steps << " continuation steps, residual " << d.residual_norm
      << ", u_max = " << format_number(s.max_value()) << '\n';
  if (cfg.formats & csv) {
    std::ofstream f = open_output(cfg.out_dir / "solution.csv");
    write_solution_csv(f, s);
  }
  if (cfg.formats & json) {
    nlohmann::json diag = diagnostics_json(s);
    diag["message"] = "";
    write_json(cfg.out_dir / "diagnostics.json", diag);
  }
  if (cfg.formats & svg)
    write_text(cfg.out_dir / "solution.svg", field_svg(s, s.u, "u", true));
  return out;
}

} // namespace

int run_solve(const ExperimentConfig& cfg, std::ostream& log) {
  require_single(cfg, "solve");
  const DomainSpec domain = cfg.domain.build();
  return solve_and_write(cfg, domain, log).code;
}

int run_verify(const ExperimentConfig& cfg, std::ostream& log) {
  require_single(cfg, "verify");
  const DomainSpec domain = cfg.domain.build();
  const Solved solved = solve_and_write(cfg, domain, log);
  if (!solved.field)
    return solved.code;
  const SolutionField& s = *solved.field;

  const std::vector<TheoremReport> reports = verify_all(s, domain, cfg.verify);
  bool ok = true;
  for (const TheoremReport& r : reports) {
    log << "  " << to_string(r.id) << ": " << to_string(r.status);
    if (r.margin)
      log << " (margin " << format_number(*r.margin) << ")";
    log << (r.details.empty() ? "" : " - ") << r.details << '\n';
    ok = ok && r.status != CheckStatus::fail;
  }
  if (cfg.formats & json)
    write_json(cfg.out_dir / "report.json", report_json(reports));

  if (cfg.formats & (csv | svg)) {
    const GradientField g = gradient_field(s);
    std::optional<PhiField> phi2;
    try {
      phi2 = phi(s, 2.0, cfg.verify.slack.rho * s.mesh->h);
    } catch (const OutOfScope& e) {
      log << "note: Phi field not written: " << e.what() << '\n';
    }
    const std::vector<double> v0 = directional_derivative(s, 0.0);
    if (cfg.formats & csv) {
      if (phi2) {
        std::ofstream f = open_output(cfg.out_dir / "phi_alpha2.csv");
        write_field_csv(f, *s.mesh, s.u, g.magnitude, ExtraColumn{"Phi", phi2->values});
      }
      std::ofstream f = open_output(cfg.out_dir / "v_theta0.csv");
      write_field_csv(f, *s.mesh, s.u, g.magnitude, ExtraColumn{"v", v0});
    }
    if (cfg.formats & svg) {
      if (phi2)
        write_text(cfg.out_dir / "phi_alpha2.svg", field_svg(s, phi2->values, "Phi (alpha = 2)", true));
      PlotSpec spec;
      spec.title = "v (theta = 0), zero level";
      spec.levels = {0.0};
      write_text(cfg.out_dir / "v_theta0.svg", render_svg(*s.mesh, v0, spec));
    }
  }
  return ok ? exit_ok : exit_check_failure;
}

namespace {

SweepRow sweep_row(const ExperimentConfig& cfg, double H, double radius, double h) {
  SweepRow row;
  row.H = H;
  row.h = h;
  row.R = radius;
  try {
    const DomainSpec domain = cfg.domain.build(radius);
    const Circle circle = circumcircle(domain);
    if (domain.kind() != DomainKind::disc)
      row.R = circle.radius;
    auto mesh = std::make_shared<const Mesh>(triangulate(domain, h));
    const SolutionField s = solve_dirichlet(mesh, domain, H, cfg.a, cfg.solver);
    row.converged = true;
    row.newton_iterations = s.diagnostics.newton_iterations;
    row.u_max = s.max_value();
    const GradientField g = gradient_field(s);
    row.max_grad = *std::max_element(g.magnitude.begin(), g.magnitude.end());
    const BoundSet b =
        evaluate_bounds(H, cfg.a, row.u_max, curvature_extrema(domain).max, circle.radius);
    row.window_R2 = b.window_R2;
    row.gradient_bound = b.gradient;
    row.tilt_bound = b.tilt;
    row.height_lower = b.height_lower;
    row.height_upper = b.height_upper;
    if (!cfg.verify.checks.empty())
      for (const TheoremReport& r : verify_all(s, domain, cfg.verify))
        if (r.status == CheckStatus::fail)
          row.failed_checks.emplace_back(to_string(r.id));
  } catch (const SolveFailure& e) {
    row.error = e.what();
    row.newton_iterations = e.last_iterate().diagnostics.newton_iterations;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  if (!row.window_R2 && H >= -1.0 && H < 0.0)
    row.window_R2 = existence_window(H);
  if (row.window_R2)
    row.inside_window = (row.R / cfg.a) * (row.R / cfg.a) <= *row.window_R2;
  return row;
}

std::string cell(const std::optional<double>& x) {
  return x && std::isfinite(*x) ? format_number(*x) : std::string();
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

nlohmann::json value_or_null(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x))
    return nullptr;
  return *x;
}

} // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, int threads) {
  struct Task {
    double H, R, h;
  };
  std::vector<Task> tasks;
  const std::vector<double> radii =
      cfg.domain.kind == DomainKind::disc ? cfg.domain.radii : std::vector<double>{0.0};
  for (double H : cfg.H)
    for (double R : radii)
      for (double h : cfg.h)
        tasks.push_back({H, R, h});

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();)
      rows[k] = sweep_row(cfg, tasks[k].H, tasks[k].R, tasks[k].h);
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, tasks.size())));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "H,R,h,converged,newton_iterations,u_max,max_grad,window_R2,inside_window,"
         "gradient_bound,gradient_margin,tilt_bound,tilt_margin,height_lower,"
         "height_lower_margin,height_upper,height_upper_margin,failed_checks,error\n";
  for (const SweepRow& r : rows) {
    out << format_number(r.H) << ',' << format_number(r.R) << ',' << format_number(r.h) << ','
        << (r.converged ? 1 : 0) << ',' << r.newton_iterations << ',';
    if (r.converged)
      out << format_number(r.u_max) << ',' << format_number(r.max_grad);
    else
      out << ',';
    out << ',' << cell(r.window_R2) << ',';
    if (r.inside_window)
      out << (*r.inside_window ? 1 : 0);
    std::string failed;
    for (const std::string& id : r.failed_checks)
      failed += (failed.empty() ? "" : ";") + id;
    if (r.converged) {
      auto margin = [&](const std::optional<double>& bound) -> std::optional<double> {
        if (!bound || !std::isfinite(*bound))
          return std::nullopt;
        return *bound - r.max_grad;
      };
      out << ',' << cell(r.gradient_bound) << ',' << cell(margin(r.gradient_bound)) << ','
          << cell(r.tilt_bound) << ',' << cell(margin(r.tilt_bound)) << ','
          << format_number(r.height_lower) << ',' << format_number(r.u_max - r.height_lower)
          << ',' << cell(r.height_upper) << ','
          << cell(r.height_upper ? std::optional<double>(*r.height_upper - r.u_max)
                                 : std::nullopt);
    } else {
      out << ",,,,,,,,";
    }
    out << ',' << failed << ',' << sanitize(r.error) << '\n';
  }
}

nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    nlohmann::json j = {{"H", r.H},
                        {"R", r.R},
                        {"h", r.h},
                        {"converged", r.converged},
                        {"newton_iterations", r.newton_iterations},
                        {"window_R2", value_or_null(r.window_R2)},
                        {"inside_window", r.inside_window ? nlohmann::json(*r.inside_window)
                                                          : nlohmann::json(nullptr)},
                        {"failed_checks", r.failed_checks},
                        {"error", r.error}};
    if (r.converged) {
      j["u_max"] = r.u_max;
      j["max_grad"] = r.max_grad;
      j["gradient_bound"] = value_or_null(r.gradient_bound);
      j["tilt_bound"] = value_or_null(r.tilt_bound);
      j["height_lower"] = r.height_lower;
      j["height_upper"] = value_or_null(r.height_upper);
    }
    doc.push_back(std::move(j));
  }
  return doc;
}

int run_sweep(const ExperimentConfig& cfg, int threads, std::ostream& log) {
  if (threads < 1)
    throw ConfigError("--threads must be at least 1");
  const std::vector<SweepRow> rows = sweep(cfg, threads);
  bool converged = true, checks_ok = true;
  for (const SweepRow& r : rows) {
    log << "H = " << r.H << ", R = " << r.R << ", h = " << r.h << ": ";
    if (r.converged)
      log << "u_max = " << format_number(r.u_max) << ", max|Du| = " << format_number(r.max_grad);
    else
      log << "failed: " << r.error;
    log << '\n';
    converged = converged && r.converged;
    checks_ok = checks_ok && r.failed_checks.empty();
  }
  if (cfg.formats & csv) {
    std::ofstream f = open_output(cfg.out_dir / "sweep.csv");
    write_sweep_csv(f, rows);
  }
  if (cfg.formats & json)
    write_json(cfg.out_dir / "sweep.json", sweep_json(rows));
  if (!converged)
    return exit_nonconvergence;
  return checks_ok ? exit_ok : exit_check_failure;
}

int run_plot(const PlotRequest& request, std::ostream& log) {
  std::ifstream in(request.input);
  if (!in)
    throw fs::filesystem_error("cannot open", request.input,
                               std::make_error_code(std::errc::no_such_file_or_directory));
  const FieldTable table = read_field_csv(in);
  const std::string svg_text =
      render_contours(table, request.column, request.levels, request.auto_levels);
  fs::path target = request.output.value_or(request.input.parent_path());
  if (target.extension() != ".svg")
    target /= request.input.stem().string() + ".svg";
  write_text(target, svg_text);
  log << "wrote " << target.string() << '\n';
  return exit_ok;
}

nlohmann::json radial_summary(double H, double R, double a) {
  const RadialCap cap = radial_cap(H, R, a);
  const BoundSet b = evaluate_bounds(H, a, cap.top(), 1.0 / R, R);
  nlohmann::json j = {{"H", H},
                      {"R", R},
                      {"a", a},
                      {"m", cap.m},
                      {"c0", cap.c0},
                      {"u_max", cap.top()},
                      {"rim_slope", cap.rim_slope()},
                      {"C", b.C},
                      {"gradient_bound", value_or_null(b.gradient)},
                      {"tilt_bound", value_or_null(b.tilt)},
                      {"height_lower", b.height_lower},
                      {"height_upper", value_or_null(b.height_upper)},
                      {"window_R2", value_or_null(b.window_R2)}};
  j["inside_window"] = b.window_R2 ? nlohmann::json((R / a) * (R / a) <= *b.window_R2)
                                   : nlohmann::json(nullptr);
  return j;
}

int run_radial(double H, double R, double a, bool as_json, std::ostream& out) {
  if (!(R > 0.0) || !(a > 0.0))
    throw ConfigError("radial needs R > 0 and a > 0");
  if (!(H < 1.0))
    throw ConfigError("radial needs H < 1");
  const nlohmann::json j = radial_summary(H, R, a);
  if (as_json) {
    out << j.dump(2) << '\n';
    return exit_ok;
  }
  for (const char* key : {"H", "R", "a", "m", "c0", "u_max", "rim_slope", "C", "gradient_bound",
                          "tilt_bound", "height_lower", "height_upper", "window_R2",
                          "inside_window"}) {
    const nlohmann::json& v = j[key];
    out << key << " = ";
    if (v.is_number())
      out << format_number(v.get<double>());
    else if (v.is_boolean())
      out << (v.get<bool>() ? "yes" : "no");
    else
      out << "undefined";
    out << '\n';
  }
  return exit_ok;
}

int guarded(const std::function<int()>& body, std::ostream& log) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const DomainError& e) {
    log << "config error: invalid domain: " << e.what() << '\n';
    return exit_config_error;
  } catch (const BoundUndefined& e) {
    log << "error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_other;
  }
}

} // namespace hcmc::cli
