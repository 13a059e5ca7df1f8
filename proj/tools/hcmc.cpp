// hcmc: solve, verify and sweep the hyperbolic CMC graph Dirichlet problem.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hcmc/cli/commands.hpp"

using namespace hcmc::cli;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double x = std::stod(item, &used);
    if (used != item.size())
      throw ConfigError("bad number '" + item + "' in level list");
    out.push_back(x);
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet solver and bound checks for constant mean curvature graphs in "
               "hyperbolic space"};
  app.require_subcommand(1);
  // -h is taken by the mesh size option.
  app.set_help_flag("--help", "print this help and exit");

  std::string config_path, out_dir, formats, levels_at, column = "u", plot_input;
  double h = 0.0, H = 0.0, R = 0.0, a = 1.0;
  int threads = 1, levels = 12;

  auto add_experiment = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print this help and exit");
    sub->add_option("--config", config_path, "experiment configuration (YAML)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--format", formats, "comma-separated subset of csv,json,svg");
    sub->add_option("--h", h, "mesh size (overrides mesh.h)");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve one configuration");
  add_experiment(solve);
  CLI::App* verify = app.add_subcommand("verify", "solve and run the bound checks");
  add_experiment(verify);
  CLI::App* sweep = app.add_subcommand("sweep", "solve every (H, R, h) combination");
  add_experiment(sweep);
  sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* plot = app.add_subcommand("plot", "contour plot of a field CSV");
  plot->set_help_flag("--help", "print this help and exit");
  plot->add_option("field", plot_input, "field CSV written by solve or verify")->required();
  plot->add_option("--column", column, "column to contour");
  plot->add_option("--levels", levels, "number of equispaced levels")->check(CLI::PositiveNumber);
  plot->add_option("--at", levels_at, "explicit comma-separated levels");
  plot->add_option("--out", out_dir, "output SVG file or directory");

  CLI::App* radial = app.add_subcommand("radial", "closed-form cap and bounds over a disc");
  radial->set_help_flag("--help", "print this help and exit");
  radial->add_option("--H", H, "mean curvature, H < 1")->required();
  radial->add_option("--R", R, "disc radius")->required();
  radial->add_option("--a", a, "boundary height");
  radial->add_option("--format", formats, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  auto experiment = [&](CLI::App* sub) {
    Overrides o;
    if (!out_dir.empty())
      o.out_dir = out_dir;
    if (!formats.empty())
      o.formats = parse_formats(formats);
    if (sub->count("--h"))
      o.h = h;
    return apply_overrides(load_config(config_path), o);
  };

  return guarded(
      [&]() -> int {
        if (*solve)
          return run_solve(experiment(solve), std::cerr);
        if (*verify)
          return run_verify(experiment(verify), std::cerr);
        if (*sweep)
          return run_sweep(experiment(sweep), threads, std::cerr);
        if (*plot) {
          PlotRequest req;
          req.input = plot_input;
          req.column = column;
          req.auto_levels = levels;
          if (!levels_at.empty())
            req.levels = parse_list(levels_at);
          if (!out_dir.empty())
            req.output = out_dir;
          return run_plot(req, std::cerr);
        }
        if (formats != "" && formats != "text" && formats != "json")
          throw ConfigError("radial --format must be text or json");
        return run_radial(H, R, a, formats == "json", std::cout);
      },
      std::cerr);
}
