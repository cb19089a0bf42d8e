#include "crackdual/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "crackdual/errors.hpp"

namespace crackdual {

namespace {

int line_of(const YAML::Node& n, int fallback = 1) {
  const int l = n.Mark().line;
  return l >= 0 ? l + 1 : fallback;
}

[[noreturn]] void fail(const std::string& what, const YAML::Node& n, int fallback = 1) {
  throw ConfigError(what, line_of(n, fallback));
}

void check_keys(const YAML::Node& n, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!n.IsMap()) fail(where + " must be a mapping", n);
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where, kv.first);
  }
}

double num(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(what + " must be a number", n);
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(what + " must be a number", n);
  }
}

long long integer(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(what + " must be an integer", n);
  try {
    return n.as<long long>();
  } catch (const YAML::Exception&) {
    fail(what + " must be an integer", n);
  }
}

std::string text(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(what + " must be a string", n);
  return n.as<std::string>();
}

std::vector<double> numbers(const YAML::Node& n, const std::string& what,
                            std::size_t expect = 0) {
  if (!n.IsSequence()) fail(what + " must be a list", n);
  std::vector<double> out;
  for (const auto& x : n) out.push_back(num(x, what + " entry"));
  if (expect && out.size() != expect)
    fail(what + " needs " + std::to_string(expect) + " numbers", n);
  return out;
}

Point point(const YAML::Node& n, const std::string& what) {
  const auto v = numbers(n, what, 2);
  return {v[0], v[1]};
}

Rect rect(const YAML::Node& n, const std::string& what) {
  const auto v = numbers(n, what, 4);
  return {v[0], v[1], v[2], v[3]};
}

Disk disk(const YAML::Node& n, const std::string& what) {
  check_keys(n, {"center", "radius"}, what);
  if (!n["center"] || !n["radius"]) fail(what + " needs center and radius", n);
  return {point(n["center"], what + " center"), num(n["radius"], what + " radius")};
}

std::vector<Polyline> polylines(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(what + " must be a list of polylines", n);
  std::vector<Polyline> out;
  for (const auto& pl : n) {
    if (!pl.IsSequence()) fail(what + " entry must be a list of points", pl);
    Polyline p;
    for (const auto& v : pl) p.vertices.push_back(point(v, what + " vertex"));
    out.push_back(std::move(p));
  }
  return out;
}

template <class F>
auto wrap(const YAML::Node& n, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(e.what(), n);
  }
}

Domain domain(const YAML::Node& n) {
  check_keys(n, {"outer", "holes"}, "domain");
  if (!n["outer"]) fail("domain needs 'outer'", n);
  const Rect outer = rect(n["outer"], "domain outer");
  std::vector<Rect> holes;
  if (n["holes"]) {
    if (!n["holes"].IsSequence()) fail("domain holes must be a list", n["holes"]);
    for (const auto& h : n["holes"]) holes.push_back(rect(h, "hole"));
  }
  return wrap(n, [&] { return Domain(outer, holes); });
}

void family(const YAML::Node& n, FamilyParams& fp) {
  check_keys(n, {"a", "b", "c", "b_power", "arm", "gap", "pitch"}, "family");
  if (n["a"]) fp.a = num(n["a"], "family a");
  if (n["b"]) fp.b = num(n["b"], "family b");
  if (n["c"]) fp.c = num(n["c"], "family c");
  if (n["b_power"]) fp.b_power = num(n["b_power"], "family b_power");
  if (n["arm"]) fp.arm = num(n["arm"], "family arm");
  if (n["gap"]) fp.gap = num(n["gap"], "family gap");
  if (n["pitch"]) fp.pitch = num(n["pitch"], "family pitch");
  if (fp.c < 0) fail("family c must be >= 0", n["c"]);
}

GridKind grid_kind(const YAML::Node& n) {
  const std::string s = text(n, "grid");
  if (s == "uniform") return GridKind::uniform;
  if (s == "graded") return GridKind::graded;
  fail("grid must be uniform or graded", n);
}

BoundaryData boundary_data(const YAML::Node& n) {
  check_keys(n, {"linear", "quadratic", "polynomial", "annulus"}, "boundary_data");
  if (n.size() != 1) fail("boundary_data needs exactly one of linear, quadratic, polynomial, annulus", n);
  if (n["linear"]) {
    const auto v = numbers(n["linear"], "linear data", 3);
    return BoundaryData::linear(v[0], v[1], v[2]);
  }
  if (n["quadratic"]) {
    const auto v = numbers(n["quadratic"], "quadratic data", 3);
    return BoundaryData::quadratic(v[0], v[1], v[2]);
  }
  if (n["polynomial"]) {
    const auto v = numbers(n["polynomial"], "polynomial data", 6);
    BoundaryData g;
    std::copy(v.begin(), v.end(), g.coef.begin());
    return g;
  }
  const YAML::Node a = n["annulus"];
  check_keys(a, {"inner", "outer", "r_inner", "r_outer"}, "annulus data");
  BoundaryData g = BoundaryData::annulus(0, 1, 1, 2);
  if (a["inner"]) g.inner = num(a["inner"], "annulus inner");
  if (a["outer"]) g.outer = num(a["outer"], "annulus outer");
  if (a["r_inner"]) g.r_inner = num(a["r_inner"], "annulus r_inner");
  if (a["r_outer"]) g.r_outer = num(a["r_outer"], "annulus r_outer");
  if (!(g.r_outer > g.r_inner)) fail("annulus data needs r_outer > r_inner", a);
  return g;
}

void geometry_block(const YAML::Node& n, GeometryConfig& geo) {
  check_keys(n, {"domain", "cracks", "dirichlet"}, "geometry");
  if (!n["domain"]) fail("geometry needs 'domain'", n);
  geo.domain = domain(n["domain"]);
  if (n["cracks"])
    geo.cracks = wrap(n["cracks"], [&] { return CrackSet(polylines(n["cracks"], "cracks")); });
  std::vector<Segment> dir;
  const YAML::Node d = n["dirichlet"];
  if (!d || (d.IsScalar() && d.as<std::string>() == "all")) {
    dir = geo.domain.boundary_segments();
  } else {
    if (!d.IsSequence()) fail("dirichlet must be 'all' or a list of segments", d);
    for (const auto& s : d) {
      if (!s.IsSequence() || s.size() != 2) fail("dirichlet segment needs two points", s);
      dir.push_back({point(s[0], "dirichlet point"), point(s[1], "dirichlet point")});
    }
  }
  geo.boundary = wrap(n, [&] { return BoundarySpec(geo.domain, dir); });
  for (const Polyline& pl : geo.cracks.polylines())
    for (Point p : pl.vertices)
      if (!geo.domain.contains(p)) fail("crack vertex outside the domain", n["cracks"]);
}

void weights_block(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, {"default", "regions"}, "weights");
  if (n["default"]) cfg.default_weight = num(n["default"], "default weight");
  if (!(cfg.default_weight > 0)) fail("weights must be positive", n["default"]);
  if (!n["regions"]) return;
  if (!n["regions"].IsSequence()) fail("weight regions must be a list", n["regions"]);
  for (const auto& r : n["regions"]) {
    check_keys(r, {"rect", "value"}, "weight region");
    if (!r["rect"] || !r["value"]) fail("weight region needs rect and value", r);
    WeightRegion w{rect(r["rect"], "weight rect"), num(r["value"], "weight value")};
    if (!(w.value > 0)) fail("weights must be positive", r["value"]);
    cfg.weights.push_back(w);
  }
}

void gamma_block(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n,
             {"experiment", "h", "a", "b", "resolution", "grid", "cells_per_feature", "grading",
              "junction_mode", "test_fields", "threads", "stable_ratio"},
             "gamma");
  ExperimentConfig& ec = cfg.gamma;
  if (n["experiment"]) {
    try {
      ec.kind = parse_experiment(text(n["experiment"], "experiment"));
    } catch (const Error& e) {
      fail(e.what(), n["experiment"]);
    }
  }
  if (n["h"]) {
    ec.h_list.clear();
    if (!n["h"].IsSequence()) fail("gamma h must be a list", n["h"]);
    for (const auto& h : n["h"]) {
      const long long v = integer(h, "h");
      if (v < 1) fail("h must be >= 1", h);
      ec.h_list.push_back(static_cast<int>(v));
    }
    if (ec.h_list.empty()) fail("gamma h list is empty", n["h"]);
  }
  if (n["a"]) ec.a_list = numbers(n["a"], "gamma a");
  if (n["b"]) ec.b_list = numbers(n["b"], "gamma b");
  if ((n["a"] || n["b"]) && (ec.a_list.size() != ec.h_list.size() ||
                             ec.b_list.size() != ec.h_list.size()))
    fail("gamma a and b lists must both match the h list in length", n["a"] ? n["a"] : n["b"]);
  if (n["resolution"]) ec.resolution = num(n["resolution"], "gamma resolution");
  if (n["grid"]) ec.grid = grid_kind(n["grid"]);
  if (n["cells_per_feature"])
    ec.cells_per_feature = num(n["cells_per_feature"], "cells_per_feature");
  if (n["grading"]) ec.grading = num(n["grading"], "grading");
  if (n["junction_mode"]) {
    const std::string m = text(n["junction_mode"], "junction_mode");
    if (m == "measured") ec.junction_mode = JunctionMode::measured;
    else if (m == "symmetric") ec.junction_mode = JunctionMode::symmetric;
    else fail("junction_mode must be measured or symmetric", n["junction_mode"]);
  }
  if (n["test_fields"]) ec.test_fields = static_cast<int>(integer(n["test_fields"], "test_fields"));
  if (n["threads"]) ec.threads = static_cast<int>(integer(n["threads"], "threads"));
  if (n["stable_ratio"]) ec.stable_ratio = num(n["stable_ratio"], "stable_ratio");
  if (!(ec.resolution > 0)) fail("gamma resolution must be positive", n);
  if (ec.test_fields < 1) fail("test_fields must be >= 1", n["test_fields"]);
  cfg.has_gamma = true;
}

CapacitySet capacity_set(const YAML::Node& n) {
  check_keys(n, {"points", "disk", "cracks"}, "capacity set");
  if (n.size() != 1) fail("capacity set needs exactly one of points, disk, cracks", n);
  CapacitySet s;
  if (n["points"]) {
    s.kind = CapacitySet::Kind::points;
    if (!n["points"].IsSequence()) fail("points must be a list", n["points"]);
    for (const auto& p : n["points"]) s.points.push_back(point(p, "point"));
  } else if (n["disk"]) {
    s.kind = CapacitySet::Kind::disk;
    s.disk = disk(n["disk"], "set disk");
    if (!(s.disk.radius > 0)) fail("disk radius must be positive", n["disk"]);
  } else {
    s.kind = CapacitySet::Kind::cracks;
    s.cracks = wrap(n["cracks"], [&] { return CrackSet(polylines(n["cracks"], "cracks")); });
  }
  return s;
}

void capacity_block(const YAML::Node& n, RunConfig& cfg) {
  check_keys(n, {"set", "container", "r", "delta_cells", "resolutions"}, "capacity");
  CapacityQuery& q = cfg.capacity;
  if (!n["set"]) fail("capacity needs 'set'", n);
  q.set = capacity_set(n["set"]);
  if (n["container"]) {
    const YAML::Node c = n["container"];
    check_keys(c, {"disk", "rect"}, "container");
    if (c.size() != 1) fail("container needs exactly one of disk, rect", c);
    if (c["disk"]) {
      q.container.kind = Container::Kind::disk;
      q.container.disk = disk(c["disk"], "container disk");
      if (!(q.container.disk.radius > 0)) fail("container radius must be positive", c["disk"]);
    } else {
      q.container.kind = Container::Kind::rect;
      q.container.rect = rect(c["rect"], "container rect");
    }
  }
  if (n["r"]) q.r = num(n["r"], "capacity r");
  if (!(q.r > 1)) fail("capacity r must exceed 1", n["r"]);
  if (n["delta_cells"]) q.delta_cells = num(n["delta_cells"], "delta_cells");
  if (!(q.delta_cells >= 1)) fail("delta must be at least one cell", n["delta_cells"]);
  cfg.capacity_resolutions = {32, 64, 128, 256};
  if (n["resolutions"]) cfg.capacity_resolutions = numbers(n["resolutions"], "resolutions");
  if (cfg.capacity_resolutions.empty()) fail("resolutions list is empty", n["resolutions"]);
  for (double r : cfg.capacity_resolutions)
    if (!(r > 0)) fail("resolutions must be positive", n["resolutions"]);
  cfg.has_capacity = true;
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("malformed document: " + e.msg, e.mark.line + 1);
  }
}

}  // namespace

RunConfig parse_config(const std::string& src, const std::string& path) {
  const YAML::Node root = parse_yaml(src);
  RunConfig cfg;
  cfg.path = path;
  if (!root || root.IsNull()) throw ConfigError("empty config", 1);
  check_keys(root,
             {"example", "h", "family", "grid", "geometry", "p", "epsilon", "weights",
              "boundary_data", "resolution", "tol", "max_iter", "seed", "dual", "gamma",
              "capacity"},
             "config");

  GeometryConfig& geo = cfg.geometry;
  if (root["example"] && root["geometry"])
    fail("give either 'example' or 'geometry', not both", root["geometry"]);
  if (root["example"]) {
    try {
      geo.example = parse_example(text(root["example"], "example"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what(), root["example"]);
    }
    cfg.gamma = default_experiment_config(*geo.example);
    geo.family = cfg.gamma.family;
    geo.grid = cfg.gamma.grid;
    cfg.g = default_boundary_data(*geo.example);
    if (root["h"]) {
      const long long h = integer(root["h"], "h");
      if (h < 1) fail("h must be >= 1", root["h"]);
      geo.h = static_cast<int>(h);
    }
    if (root["family"]) family(root["family"], geo.family);
    if (root["grid"]) geo.grid = grid_kind(root["grid"]);
    cfg.gamma.family = geo.family;
  } else {
    for (const char* k : {"h", "family", "grid", "gamma"})
      if (root[k]) fail(std::string("'") + k + "' needs an example", root[k]);
    if (root["geometry"]) geometry_block(root["geometry"], geo);
  }

  const bool has_problem = root["example"] || root["geometry"];
  if (root["p"]) {
    cfg.p = num(root["p"], "p");
    if (!(*cfg.p > 1) || !std::isfinite(*cfg.p)) fail("p must be finite and > 1", root["p"]);
  } else if (has_problem) {
    throw ConfigError("missing required key 'p'", line_of(root));
  }
  if (root["epsilon"]) cfg.epsilon = num(root["epsilon"], "epsilon");
  if (cfg.epsilon < 0) fail("epsilon must be >= 0", root["epsilon"]);
  if (root["weights"]) weights_block(root["weights"], cfg);
  if (root["boundary_data"]) cfg.g = boundary_data(root["boundary_data"]);
  if (root["resolution"]) {
    cfg.resolution = num(root["resolution"], "resolution");
    if (!(cfg.resolution > 0)) fail("resolution must be positive", root["resolution"]);
  }
  if (root["tol"]) {
    cfg.tol = num(root["tol"], "tol");
    if (cfg.tol < 0) fail("tol must be >= 0", root["tol"]);
  }
  if (root["max_iter"]) {
    cfg.max_iter = static_cast<int>(integer(root["max_iter"], "max_iter"));
    if (cfg.max_iter < 1) fail("max_iter must be >= 1", root["max_iter"]);
  }
  if (root["seed"]) {
    const long long s = integer(root["seed"], "seed");
    if (s < 0) fail("seed must be >= 0", root["seed"]);
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root["dual"]) {
    const YAML::Node d = root["dual"];
    check_keys(d, {"method"}, "dual");
    if (d["method"]) {
      const std::string m = text(d["method"], "dual method");
      if (m == "solve") cfg.dual_method = DualMethod::solve;
      else if (m == "conjugate") cfg.dual_method = DualMethod::conjugate;
      else fail("dual method must be solve or conjugate", d["method"]);
    }
  }

  if (geo.example) {
    ExperimentConfig& ec = cfg.gamma;
    if (cfg.p) ec.p = *cfg.p;
    ec.g = cfg.g;
    ec.tol = cfg.tol;
    ec.max_iter = cfg.max_iter;
    ec.seed = cfg.seed;
    if (root["resolution"]) ec.resolution = cfg.resolution;
    if (root["gamma"]) gamma_block(root["gamma"], cfg);
  }
  if (root["capacity"]) {
    capacity_block(root["capacity"], cfg);
    cfg.capacity.tol = cfg.tol;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

SetFile load_set_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read set file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const YAML::Node root = parse_yaml(ss.str());
  SetFile out;
  if (!root || root.IsNull()) return out;
  check_keys(root, {"domain", "polylines"}, "set file");
  if (root["domain"]) out.domain = domain(root["domain"]);
  if (root["polylines"] && !root["polylines"].IsNull())
    out.set = wrap(root["polylines"],
                   [&] { return CrackSet(polylines(root["polylines"], "polylines")); });
  return out;
}

ProblemSetup make_problem(const RunConfig& cfg) {
  const GeometryConfig& geo = cfg.geometry;
  if (!cfg.p) throw ConfigError("missing required key 'p'", 1);
  ProblemSetup s;
  FamilyParams fp = geo.family;
  fp.p = *cfg.p;
  GridLines lines;
  if (geo.example) {
    const Example e = *geo.example;
    s.domain = example_domain(e);
    s.boundary = example_boundary(e, s.domain);
    if (geo.h) {
      s.cracks = crack_family(e, *geo.h, fp);
      ExperimentConfig ec = cfg.gamma;
      ec.family = fp;
      ec.p = *cfg.p;
      ec.h_list = {*geo.h};
      ec.a_list.clear();
      ec.b_list.clear();
      ec.resolution = cfg.resolution;
      ec.grid = geo.grid;
      ec.cells_per_feature = geo.cells_per_feature;
      ec.grading = geo.grading;
      lines = experiment_grid(ec);
    } else {
      s.cracks = crack_limit(e, fp);
      lines = GridLines::uniform(s.domain.outer(), cfg.resolution);
    }
  } else {
    s.domain = geo.domain;
    s.cracks = geo.cracks;
    s.boundary = geo.boundary;
    lines = GridLines::uniform(s.domain.outer(), cfg.resolution);
  }
  s.mesh = build_mesh(s.domain, s.cracks, s.boundary, lines);
  const BoundaryData& g = cfg.g;
  s.g = interpolate(s.mesh, [&](double x, double y) { return g(x, y); });
  if (cfg.weights.empty() && cfg.default_weight == 1)
    s.f = Integrand(*cfg.p, cfg.epsilon);
  else
    s.f = Integrand(*cfg.p, region_weights(s.mesh, cfg.weights, cfg.default_weight), cfg.epsilon);
  return s;
}

}  // namespace crackdual
