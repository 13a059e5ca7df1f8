#include "hcmc/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace hcmc::cli {

unsigned parse_formats(std::string_view list) {
  unsigned mask = 0;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, end - start);
    if (item == "csv")
      mask |= csv;
    else if (item == "json")
      mask |= json;
    else if (item == "svg")
      mask |= svg;
    else
      throw ConfigError("unknown output format '" + std::string(item) + "'");
    start = end + 1;
  }
  if (mask == 0)
    throw ConfigError("at least one output format is required");
  return mask;
}

DomainSpec DomainConfig::build(double radius) const {
  switch (kind) {
  case DomainKind::disc:
    return make_domain(kind, {radius > 0.0 ? radius : radii.front()}, center);
  case DomainKind::ellipse:
    return make_domain(kind, params, center);
  case DomainKind::curve:
    return load_curve_domain(points_file);
  }
  throw DomainError("unknown domain kind");
}

namespace {

class Parser {
public:
  Parser(std::string source, std::filesystem::path base)
      : source_(std::move(source)), base_(std::move(base)) {}

  ExperimentConfig parse(const YAML::Node& root) {
    if (!root.IsMap())
      fail(root, "top level must be a mapping of sections");
    allow(root, {"domain", "problem", "mesh", "solver", "checks", "output"});
    ExperimentConfig cfg;
    parse_domain(require(root, "domain"), cfg.domain);
    parse_problem(require(root, "problem"), cfg);
    parse_mesh(require(root, "mesh"), cfg);
    if (root["solver"])
      parse_solver(root["solver"], cfg.solver);
    if (root["checks"])
      parse_checks(root["checks"], cfg.verify);
    if (root["output"])
      parse_output(root["output"], cfg);
    return cfg;
  }

private:
  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    std::ostringstream msg;
    msg << source_;
    const YAML::Mark mark = node.Mark();
    if (!mark.is_null())
      msg << ':' << mark.line + 1 << ':' << mark.column + 1;
    msg << ": " << message;
    throw ConfigError(msg.str());
  }

  void allow(const YAML::Node& map, std::initializer_list<std::string_view> keys) const {
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        fail(kv.first, "unknown key '" + key + "'");
    }
  }

  YAML::Node require(const YAML::Node& map, const char* key) const {
    if (!map.IsMap())
      fail(map, "expected a mapping");
    const YAML::Node node = map[key];
    if (!node)
      fail(map, std::string("missing required key '") + key + "'");
    return node;
  }

  double real(const YAML::Node& node, std::string_view what) const {
    if (!node.IsScalar())
      fail(node, std::string(what) + " must be a number");
    try {
      const double x = node.as<double>();
      if (!std::isfinite(x))
        fail(node, std::string(what) + " must be finite");
      return x;
    } catch (const YAML::BadConversion&) {
      fail(node, std::string(what) + " must be a number, got '" + node.Scalar() + "'");
    }
  }

  int integer(const YAML::Node& node, std::string_view what) const {
    if (!node.IsScalar())
      fail(node, std::string(what) + " must be an integer");
    try {
      return node.as<int>();
    } catch (const YAML::BadConversion&) {
      fail(node, std::string(what) + " must be an integer, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, std::string_view what) const {
    if (!node.IsScalar())
      fail(node, std::string(what) + " must be a string");
    return node.Scalar();
  }

  /// A scalar or a non-empty sequence of scalars.
  std::vector<double> reals(const YAML::Node& node, std::string_view what) const {
    std::vector<double> out;
    if (node.IsSequence()) {
      if (node.size() == 0)
        fail(node, std::string(what) + " list must not be empty");
      for (const auto& item : node)
        out.push_back(real(item, what));
    } else {
      out.push_back(real(node, what));
    }
    return out;
  }

  void parse_domain(const YAML::Node& node, DomainConfig& d) const {
    if (!node.IsMap())
      fail(node, "domain must be a mapping");
    allow(node, {"kind", "radius", "semi_axes", "center", "points_file"});
    const YAML::Node kind = require(node, "kind");
    try {
      d.kind = domain_kind_from_string(text(kind, "domain.kind"));
    } catch (const std::invalid_argument&) {
      fail(kind, "domain.kind must be disc, ellipse or curve");
    }
    if (const YAML::Node c = node["center"]) {
      if (!c.IsSequence() || c.size() != 2)
        fail(c, "domain.center must be a pair [x, y]");
      d.center = Vec2(real(c[0], "domain.center"), real(c[1], "domain.center"));
    }
    switch (d.kind) {
    case DomainKind::disc: {
      const YAML::Node r = require(node, "radius");
      d.radii = reals(r, "domain.radius");
      for (double x : d.radii)
        if (!(x > 0.0))
          fail(r, "domain.radius must be positive");
      d.params = {d.radii.front()};
      break;
    }
    case DomainKind::ellipse: {
      const YAML::Node ax = require(node, "semi_axes");
      if (!ax.IsSequence() || ax.size() != 2)
        fail(ax, "domain.semi_axes must be a pair [p, q]");
      d.params = {real(ax[0], "domain.semi_axes"), real(ax[1], "domain.semi_axes")};
      break;
    }
    case DomainKind::curve: {
      const YAML::Node f = require(node, "points_file");
      const std::filesystem::path p = text(f, "domain.points_file");
      d.points_file = p.is_absolute() ? p : base_ / p;
      break;
    }
    }
    if (d.kind != DomainKind::disc && node["radius"])
      fail(node["radius"], "domain.radius applies to discs only");
    // Build once so that degenerate shapes are reported against the config.
    try {
      for (double r : d.kind == DomainKind::disc ? d.radii : std::vector<double>{0.0})
        (void)d.build(r);
    } catch (const std::exception& e) {
      fail(node, std::string("invalid domain: ") + e.what());
    }
  }

  void parse_problem(const YAML::Node& node, ExperimentConfig& cfg) const {
    if (!node.IsMap())
      fail(node, "problem must be a mapping");
    allow(node, {"H", "a"});
    const YAML::Node H = require(node, "H");
    cfg.H = reals(H, "problem.H");
    for (double x : cfg.H)
      if (!(x <= 1.0))
        fail(H, "problem.H must not exceed 1");
    if (const YAML::Node a = node["a"]) {
      cfg.a = real(a, "problem.a");
      if (!(cfg.a > 0.0))
        fail(a, "problem.a must be positive");
    }
  }

  void parse_mesh(const YAML::Node& node, ExperimentConfig& cfg) const {
    if (!node.IsMap())
      fail(node, "mesh must be a mapping");
    allow(node, {"h"});
    const YAML::Node h = require(node, "h");
    cfg.h = reals(h, "mesh.h");
    for (double x : cfg.h)
      if (!(x > 0.0))
        fail(h, "mesh.h must be positive");
  }

  void parse_solver(const YAML::Node& node, SolverConfig& s) const {
    if (!node.IsMap())
      fail(node, "solver must be a mapping");
    allow(node, {"newton_tol", "max_newton_iters", "continuation_steps", "damping", "min_step",
                 "initial_guess"});
    if (const auto n = node["newton_tol"])
      s.newton_tol = real(n, "solver.newton_tol");
    if (const auto n = node["max_newton_iters"])
      s.max_newton_iters = integer(n, "solver.max_newton_iters");
    if (const auto n = node["continuation_steps"])
      s.continuation_steps = integer(n, "solver.continuation_steps");
    if (const auto n = node["damping"])
      s.damping = real(n, "solver.damping");
    if (const auto n = node["min_step"])
      s.min_step = real(n, "solver.min_step");
    if (const auto n = node["initial_guess"]) {
      try {
        s.initial_guess = initial_guess_from_string(text(n, "solver.initial_guess"));
      } catch (const std::invalid_argument& e) {
        fail(n, e.what());
      }
    }
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      fail(node, std::string("solver.") + e.what());
    }
  }

  void check_ids(const YAML::Node& node, VerifyOptions& v) const {
    if (!node.IsSequence() || node.size() == 0)
      fail(node, "checks must be a non-empty list of check names");
    std::set<CheckId> seen;
    for (const auto& item : node) {
      try {
        const CheckId id = check_id_from_string(text(item, "check"));
        if (seen.insert(id).second)
          v.checks.push_back(id);
      } catch (const std::invalid_argument& e) {
        fail(item, e.what());
      }
    }
  }

  void parse_checks(const YAML::Node& node, VerifyOptions& v) const {
    if (node.IsSequence()) {
      check_ids(node, v);
      return;
    }
    if (!node.IsMap())
      fail(node, "checks must be a list or a mapping");
    allow(node, {"ids", "slack", "critical_tol_fraction", "nodal_directions"});
    if (const auto ids = node["ids"])
      check_ids(ids, v);
    if (const auto f = node["critical_tol_fraction"]) {
      v.critical_tol_fraction = real(f, "checks.critical_tol_fraction");
      if (!(v.critical_tol_fraction > 0.0 && v.critical_tol_fraction < 1.0))
        fail(f, "checks.critical_tol_fraction must lie in (0, 1)");
    }
    if (const auto n = node["nodal_directions"]) {
      v.nodal_directions = integer(n, "checks.nodal_directions");
      if (v.nodal_directions < 1)
        fail(n, "checks.nodal_directions must be at least 1");
    }
    if (const auto s = node["slack"]) {
      if (!s.IsMap())
        fail(s, "checks.slack must be a mapping");
      allow(s, {"gradient", "tilt", "boundary_gradient", "phi_min", "phi_constant", "height",
                "min_principle", "rho"});
      auto set = [&](const char* key, double& field) {
        if (const auto n = s[key]) {
          field = real(n, key);
          if (!(field >= 0.0))
            fail(n, std::string("checks.slack.") + key + " must be non-negative");
        }
      };
      set("gradient", v.slack.gradient);
      set("tilt", v.slack.tilt);
      set("boundary_gradient", v.slack.boundary_gradient);
      set("phi_min", v.slack.phi_min);
      set("phi_constant", v.slack.phi_constant);
      set("height", v.slack.height);
      set("min_principle", v.slack.min_principle);
      set("rho", v.slack.rho);
    }
  }

  void parse_output(const YAML::Node& node, ExperimentConfig& cfg) const {
    if (!node.IsMap())
      fail(node, "output must be a mapping");
    allow(node, {"dir", "formats"});
    if (const auto d = node["dir"]) {
      cfg.out_dir = text(d, "output.dir");
    }
    if (const auto f = node["formats"]) {
      std::string list;
      if (f.IsSequence()) {
        if (f.size() == 0)
          fail(f, "output.formats must not be empty");
        for (const auto& item : f)
          list += (list.empty() ? "" : ",") + text(item, "output.formats");
      } else {
        list = text(f, "output.formats");
      }
      try {
        cfg.formats = parse_formats(list);
      } catch (const ConfigError& e) {
        fail(f, e.what());
      }
    }
  }

  std::string source_;
  std::filesystem::path base_;
};

} // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source_name,
                              const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    std::ostringstream msg;
    msg << source_name;
    if (!e.mark.is_null())
      msg << ':' << e.mark.line + 1 << ':' << e.mark.column + 1;
    msg << ": " << e.msg;
    throw ConfigError(msg.str());
  }
  if (!root || root.IsNull())
    throw ConfigError(std::string(source_name) + ": empty configuration");
  return Parser(std::string(source_name), base_dir).parse(root);
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw ConfigError(file.string() + ": cannot open configuration file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), file.string(), file.parent_path());
}

} // namespace hcmc::cli
