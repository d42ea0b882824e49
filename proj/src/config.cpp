#include "encl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "encl/errors.hpp"
#include "encl/io.hpp"
#include "encl/transform.hpp"

namespace encl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at '" + path + "': " + what);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (required.count(it.key()) == 0 && optional.count(it.key()) == 0)
      fail(path + "." + it.key(), "unknown key");
  for (const auto& k : required)
    if (!obj.contains(k)) fail(path + "." + k, "missing key");
}

double number_at(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int int_at(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string string_at(const json& obj, const std::string& path,
                      const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Point point_at(const json& v, const std::string& path, int dim) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    fail(path, "expected an array of " + std::to_string(dim) + " numbers");
  Point p = Point::Zero();
  for (int a = 0; a < dim; ++a) {
    if (!v[a].is_number()) fail(path, "expected numeric coordinates");
    p[a] = v[a].get<double>();
  }
  return p;
}

std::vector<Point> point_list_at(const json& obj, const std::string& path,
                                 const char* key, int dim) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(path + "." + key, "expected an array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(point_at(v[i], path + "." + key + "[" + std::to_string(i) + "]",
                           dim));
  return out;
}

Domain parse_domain(const json& obj, int dim) {
  const std::string shape = string_at(obj, "domain", "shape");
  if (shape == "ball") {
    require_keys(obj, "domain", {"shape", "center", "radius"});
    return Domain::ball(point_at(obj.at("center"), "domain.center", dim),
                        number_at(obj, "domain", "radius"), dim);
  }
  if (shape == "box") {
    require_keys(obj, "domain", {"shape", "lo", "hi"});
    return Domain::box(point_at(obj.at("lo"), "domain.lo", dim),
                       point_at(obj.at("hi"), "domain.hi", dim), dim);
  }
  fail("domain.shape", "must be 'ball' or 'box'");
}

Inclusion parse_inclusion(const json& obj, int dim) {
  const std::string shape = string_at(obj, "inclusion", "shape");
  if (shape == "ball") {
    require_keys(obj, "inclusion", {"shape", "center", "radius"});
    return Inclusion::ball(point_at(obj.at("center"), "inclusion.center", dim),
                           number_at(obj, "inclusion", "radius"));
  }
  if (shape == "ellipse") {
    require_keys(obj, "inclusion", {"shape", "center", "semi_axes", "rotation"});
    if (dim != 2) fail("inclusion.shape", "ellipse inclusions are 2D only");
    const auto& ax = obj.at("semi_axes");
    if (!ax.is_array() || ax.size() != 2)
      fail("inclusion.semi_axes", "expected two numbers");
    return Inclusion::ellipse(
        point_at(obj.at("center"), "inclusion.center", dim),
        Eigen::Vector2d(ax[0].get<double>(), ax[1].get<double>()),
        number_at(obj, "inclusion", "rotation"));
  }
  fail("inclusion.shape", "must be 'ball' or 'ellipse'");
}

ConductivitySpec parse_conductivity(const json& obj, int dim) {
  require_keys(obj, "conductivity", {"tensor", "class"});
  const auto& t = obj.at("tensor");
  if (!t.is_array() || static_cast<int>(t.size()) != dim * dim)
    fail("conductivity.tensor",
         "expected " + std::to_string(dim * dim) + " row-major entries");
  Eigen::MatrixXd tensor(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const auto& e = t[i * dim + j];
      if (!e.is_number()) fail("conductivity.tensor", "entries must be numbers");
      tensor(i, j) = e.get<double>();
    }
  const std::string cls = string_at(obj, "conductivity", "class");
  ContrastClass cc;
  if (cls == "A1") cc = ContrastClass::A1;
  else if (cls == "A2") cc = ContrastClass::A2;
  else if (cls == "indefinite") cc = ContrastClass::Indefinite;
  else fail("conductivity.class", "must be 'A1', 'A2', or 'indefinite'");
  return ConductivitySpec::make(tensor, cc);
}

FluxSpec parse_flux(const json& obj) {
  const std::string variant = string_at(obj, "flux", "variant");
  if (variant == "constant") {
    require_keys(obj, "flux", {"variant", "value"}, {"mu"});
    const double a = number_at(obj, "flux", "value");
    const double mu = obj.contains("mu") ? number_at(obj, "flux", "mu") : 1.0;
    return FluxSpec::constant_flux(a, mu);
  }
  if (variant == "time_power") {
    require_keys(obj, "flux", {"variant", "power", "mu"});
    return FluxSpec::time_power(int_at(obj, "flux", "power"),
                                number_at(obj, "flux", "mu"));
  }
  if (variant == "probe") {
    require_keys(obj, "flux", {"variant", "phi"});
    const std::string phi = string_at(obj, "flux", "phi");
    if (phi == "one") return FluxSpec::probe_flux(PhiVariant::One);
    if (phi == "ramp") return FluxSpec::probe_flux(PhiVariant::Ramp);
    fail("flux.phi", "must be 'one' or 'ramp'");
  }
  fail("flux.variant", "must be 'constant', 'time_power', or 'probe'");
}

}  // namespace

std::vector<double> RunConfig::tau_sweep() const {
  return geometric_tau_sweep(tau_min, tau_ratio, tau_count);
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(root, "<root>",
               {"dimension", "domain", "inclusion", "conductivity", "flux",
                "grid", "tau", "theorem"},
               {"output", "seed", "workers"});

  RunConfig cfg;
  cfg.dimension = int_at(root, "<root>", "dimension");
  if (cfg.dimension != 2 && cfg.dimension != 3)
    fail("dimension", "must be 2 or 3");

  cfg.scene.domain = parse_domain(root.at("domain"), cfg.dimension);
  cfg.scene.inclusion = parse_inclusion(root.at("inclusion"), cfg.dimension);
  cfg.scene.validate();
  cfg.conductivity = parse_conductivity(root.at("conductivity"), cfg.dimension);
  cfg.flux = parse_flux(root.at("flux"));

  const auto& grid = root.at("grid");
  require_keys(grid, "grid", {"n", "n_time", "T"});
  cfg.n = int_at(grid, "grid", "n");
  cfg.n_time = int_at(grid, "grid", "n_time");
  cfg.T = number_at(grid, "grid", "T");
  if (cfg.n < 8) fail("grid.n", "must be >= 8");
  if (cfg.n_time < 8) fail("grid.n_time", "must be >= 8");
  if (cfg.T <= 0) fail("grid.T", "must be positive");

  const auto& tau = root.at("tau");
  require_keys(tau, "tau", {"min", "ratio", "count"});
  cfg.tau_min = number_at(tau, "tau", "min");
  cfg.tau_ratio = number_at(tau, "tau", "ratio");
  cfg.tau_count = int_at(tau, "tau", "count");
  if (cfg.tau_min <= 0) fail("tau.min", "must be positive");
  if (cfg.tau_ratio <= 1) fail("tau.ratio", "must exceed 1");
  if (cfg.tau_count < 1) fail("tau.count", "must be >= 1");

  const auto& thm = root.at("theorem");
  require_keys(thm, "theorem", {"selector"},
               {"directions", "points", "centers"});
  cfg.theorem = string_at(thm, "theorem", "selector");
  if (cfg.theorem != "T1.1" && cfg.theorem != "T1.2" &&
      cfg.theorem != "T1.3" && cfg.theorem != "T1.4")
    fail("theorem.selector", "must be one of T1.1, T1.2, T1.3, T1.4");
  if (thm.contains("directions"))
    cfg.directions = point_list_at(thm, "theorem", "directions", cfg.dimension);
  if (thm.contains("points"))
    cfg.points = point_list_at(thm, "theorem", "points", cfg.dimension);
  if (thm.contains("centers"))
    cfg.centers = point_list_at(thm, "theorem", "centers", cfg.dimension);

  if (cfg.theorem == "T1.2") {
    if (cfg.directions.empty())
      fail("theorem.directions", "T1.2 needs at least one direction");
    for (std::size_t i = 0; i < cfg.directions.size(); ++i) {
      double n2 = 0;
      for (int a = 0; a < cfg.dimension; ++a)
        n2 += cfg.directions[i][a] * cfg.directions[i][a];
      if (std::abs(n2 - 1.0) > 1e-9)
        fail("theorem.directions[" + std::to_string(i) + "]",
             "must be a unit vector");
    }
  }
  if (cfg.theorem == "T1.3") {
    if (cfg.points.empty())
      fail("theorem.points", "T1.3 needs at least one point");
    for (std::size_t i = 0; i < cfg.points.size(); ++i)
      if (cfg.scene.domain.distance_to_boundary(cfg.points[i]) > -1e-12)
        fail("theorem.points[" + std::to_string(i) + "]",
             "must lie outside the closure of the domain");
  }
  if (cfg.theorem == "T1.4" && cfg.centers.empty())
    fail("theorem.centers", "T1.4 needs at least one center");

  if (root.contains("output")) {
    const auto& out = root.at("output");
    require_keys(out, "output", {"directory"});
    cfg.output_dir = string_at(out, "output", "directory");
  }
  if (root.contains("seed")) {
    const auto& v = root.at("seed");
    if (!v.is_number_unsigned()) fail("seed", "expected a non-negative integer");
    cfg.seed = v.get<unsigned>();
  }
  if (root.contains("workers")) {
    cfg.workers = int_at(root, "<root>", "workers");
    if (cfg.workers < 1) fail("workers", "must be >= 1");
  }

  cfg.canonical_text = root.dump(2);
  cfg.hash = config_hash(cfg.canonical_text);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string benchmark_config_json() {
  return R"({
  "dimension": 2,
  "domain": {"shape": "ball", "center": [0.0, 0.0], "radius": 1.0},
  "inclusion": {"shape": "ball", "center": [0.2, 0.0], "radius": 0.3},
  "conductivity": {"tensor": [2.0, 0.0, 0.0, 2.0], "class": "A2"},
  "flux": {"variant": "constant", "value": 1.0, "mu": 1.0},
  "grid": {"n": 128, "n_time": 256, "T": 1.0},
  "tau": {"min": 10.0, "ratio": 1.3, "count": 12},
  "theorem": {"selector": "T1.1"},
  "output": {"directory": "out"},
  "seed": 0,
  "workers": 1
})";
}

}  // namespace encl
