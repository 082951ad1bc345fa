#include "config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace nscond {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + join(path, key) + "'");
  }
}

double number(const json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& j, const std::string& key,
                                      const std::string& path, std::optional<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  return number(j, key, path, 0.0);
}

std::uint64_t count(const json& j, const std::string& key, const std::string& path,
                    std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ConfigError(join(path, key) + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(join(path, key) + ": expected true or false");
  return j.at(key).get<bool>();
}

std::string text(const json& j, const std::string& key, const std::string& path,
                 const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(join(path, key) + ": expected a string");
  return j.at(key).get<std::string>();
}

Rect rect_value(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) {
    throw ConfigError(where + ": expected [xmin, ymin, xmax, ymax]");
  }
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": expected [xmin, ymin, xmax, ymax]");
  }
  try {
    return Rect::make(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                      v[3].get<double>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::optional<Rect> optional_rect(const json& j, const std::string& key, const std::string& path,
                                  std::optional<Rect> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  return rect_value(j.at(key), join(path, key));
}

json rect_json(const Rect& r) { return json::array({r.xmin, r.ymin, r.xmax, r.ymax}); }

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

ThinningSpec parse_thinning(const json& j, const std::string& path) {
  expect_object(j, path);
  ThinningSpec t;
  t.variant = text(j, "variant", path, t.variant);
  if (t.variant == "constant") {
    check_keys(j, path, {"variant", "alpha"});
    t.alpha = number(j, "alpha", path, t.alpha);
  } else if (t.variant == "step") {
    check_keys(j, path, {"variant", "alpha1", "alpha2", "v"});
    t.alpha1 = number(j, "alpha1", path, t.alpha1);
    t.alpha2 = number(j, "alpha2", path, t.alpha2);
    t.v = number(j, "v", path, t.v);
  } else if (t.variant == "linear") {
    check_keys(j, path, {"variant", "intercept", "slope"});
    t.intercept = number(j, "intercept", path, t.intercept);
    t.slope = number(j, "slope", path, t.slope);
  } else if (t.variant == "grid") {
    check_keys(j, path, {"variant", "extent", "nx", "ny", "values"});
    if (j.contains("extent")) t.extent = rect_value(j.at("extent"), join(path, "extent"));
    t.nx = count(j, "nx", path, 0);
    t.ny = count(j, "ny", path, 0);
    if (!j.contains("values") || !j.at("values").is_array()) {
      throw ConfigError(join(path, "values") + ": expected an array of numbers");
    }
    for (const auto& e : j.at("values")) {
      if (!e.is_number()) throw ConfigError(join(path, "values") + ": expected numbers");
      t.values.push_back(e.get<double>());
    }
  } else {
    throw ConfigError(join(path, "variant") + ": unknown thinning variant '" + t.variant +
                      "' (constant, step, linear, grid)");
  }
  try {
    (void)t.build();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return t;
}

json thinning_json(const ThinningSpec& t) {
  json j;
  j["variant"] = t.variant;
  if (t.variant == "constant") {
    j["alpha"] = t.alpha;
  } else if (t.variant == "step") {
    j["alpha1"] = t.alpha1;
    j["alpha2"] = t.alpha2;
    j["v"] = t.v;
  } else if (t.variant == "linear") {
    j["intercept"] = t.intercept;
    j["slope"] = t.slope;
  } else {
    j["extent"] = rect_json(t.extent);
    j["nx"] = t.nx;
    j["ny"] = t.ny;
    j["values"] = t.values;
  }
  return j;
}

void check_hole(const Rect& S, const std::optional<Rect>& W_h, const std::string& key) {
  if (!W_h) return;
  require(W_h->xmin >= S.xmin && W_h->ymin >= S.ymin && W_h->xmax <= S.xmax &&
              W_h->ymax <= S.ymax,
          key, "hole must lie inside S");
  require(W_h->area() < S.area(), key, "hole must not cover all of S");
}

}  // namespace

ThinningField ThinningSpec::build() const {
  if (variant == "constant") return ThinningField::constant(alpha);
  if (variant == "step") return ThinningField::step(alpha1, alpha2, v);
  if (variant == "linear") return ThinningField::linear(intercept, slope);
  if (variant == "grid") return ThinningField::grid(extent, nx, ny, values);
  throw InvalidArgument("unknown thinning variant '" + variant + "'");
}

ObservationScheme RunConfig::scheme() const {
  return ObservationScheme::with_hole(S, W_h, r, r / 50.0);
}

ExperimentSettings RunConfig::settings() const {
  ExperimentSettings s;
  s.N = experiment.N;
  s.n_sim = experiment.n_sim;
  s.grid = DistanceGrid::equispaced(experiment.d_max, experiment.distance_count);
  s.quad_h = experiment.quad_h;
  s.stat_h = experiment.stat_h;
  s.level = experiment.level;
  s.self_consistency = experiment.self_consistency;
  return s;
}

std::vector<ExperimentCell> RunConfig::cells() const {
  std::vector<ExperimentCell> out;
  if (experiment.cells.empty()) {
    if (!W_h) throw ConfigError("geometry.W_h: the validation experiment needs a hole");
    out.push_back({"cell", model(), thinning.build(), S, *W_h});
    return out;
  }
  for (const CellConfig& c : experiment.cells) {
    if (!c.W_h) throw ConfigError("experiment.cells: cell '" + c.label + "' needs W_h");
    out.push_back({c.label, ClusterModel::make(kappa, mu, c.r), c.thinning.build(), S, *c.W_h});
  }
  return out;
}

RunConfig parse_config(const std::string& source) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  expect_object(root, "");
  check_keys(root, "",
             {"model", "thinning", "geometry", "experiment", "oracle", "condint", "seed", "output"});
  RunConfig cfg;

  if (root.contains("model")) {
    const json& m = root.at("model");
    expect_object(m, "model");
    check_keys(m, "model", {"kappa", "mu", "r"});
    cfg.kappa = number(m, "kappa", "model", cfg.kappa);
    cfg.mu = number(m, "mu", "model", cfg.mu);
    cfg.r = number(m, "r", "model", cfg.r);
  }
  require(cfg.kappa > 0.0 && std::isfinite(cfg.kappa), "model.kappa", "must be positive");
  require(cfg.mu > 0.0 && std::isfinite(cfg.mu), "model.mu", "must be positive");
  require(cfg.r > 0.0 && std::isfinite(cfg.r), "model.r", "must be positive");

  if (root.contains("thinning")) cfg.thinning = parse_thinning(root.at("thinning"), "thinning");

  if (root.contains("geometry")) {
    const json& g = root.at("geometry");
    expect_object(g, "geometry");
    check_keys(g, "geometry", {"S", "W_h"});
    if (g.contains("S")) cfg.S = rect_value(g.at("S"), "geometry.S");
    cfg.W_h = optional_rect(g, "W_h", "geometry", cfg.W_h);
  }
  require(cfg.S.finite() && cfg.S.area() > 0.0, "geometry.S", "must be a finite rectangle");
  check_hole(cfg.S, cfg.W_h, "geometry.W_h");

  auto& ex = cfg.experiment;
  if (root.contains("experiment")) {
    const json& e = root.at("experiment");
    const std::string p = "experiment";
    expect_object(e, p);
    check_keys(e, p,
               {"N", "n_sim", "distance", "quad_h", "stat_h", "level", "self_consistency",
                "cells"});
    ex.N = count(e, "N", p, ex.N);
    ex.n_sim = count(e, "n_sim", p, ex.n_sim);
    if (e.contains("distance")) {
      const json& d = e.at("distance");
      expect_object(d, "experiment.distance");
      check_keys(d, "experiment.distance", {"d_max", "count"});
      ex.d_max = number(d, "d_max", "experiment.distance", ex.d_max);
      ex.distance_count = count(d, "count", "experiment.distance", ex.distance_count);
    }
    ex.quad_h = optional_number(e, "quad_h", p, ex.quad_h);
    ex.stat_h = number(e, "stat_h", p, ex.stat_h);
    ex.level = number(e, "level", p, ex.level);
    ex.self_consistency = boolean(e, "self_consistency", p, ex.self_consistency);
    if (e.contains("cells")) {
      const json& cells = e.at("cells");
      if (!cells.is_array()) throw ConfigError("experiment.cells: expected an array");
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string cp = "experiment.cells[" + std::to_string(i) + "]";
        const json& c = cells[i];
        expect_object(c, cp);
        check_keys(c, cp, {"label", "thinning", "W_h", "r"});
        CellConfig cell;
        cell.label = text(c, "label", cp, "cell" + std::to_string(i));
        require(!cell.label.empty() && cell.label.find_first_of("/\\") == std::string::npos,
                join(cp, "label"), "must be a non-empty name without path separators");
        cell.thinning = c.contains("thinning") ? parse_thinning(c.at("thinning"),
                                                                join(cp, "thinning"))
                                               : cfg.thinning;
        cell.W_h = optional_rect(c, "W_h", cp, cfg.W_h);
        check_hole(cfg.S, cell.W_h, join(cp, "W_h"));
        cell.r = number(c, "r", cp, cfg.r);
        require(cell.r > 0.0 && std::isfinite(cell.r), join(cp, "r"), "must be positive");
        ex.cells.push_back(std::move(cell));
      }
    }
  }
  require(ex.N >= 2, "experiment.N", "must be >= 2");
  require(ex.n_sim >= 1, "experiment.n_sim", "must be >= 1");
  require(ex.d_max > 0.0 && std::isfinite(ex.d_max), "experiment.distance.d_max",
          "must be positive");
  require(ex.distance_count >= 11, "experiment.distance.count", "must be >= 11");
  require(!ex.quad_h || (*ex.quad_h > 0.0 && std::isfinite(*ex.quad_h)), "experiment.quad_h",
          "must be positive");
  require(ex.stat_h > 0.0 && std::isfinite(ex.stat_h), "experiment.stat_h", "must be positive");
  require(ex.level > 0.0 && ex.level <= 1.0, "experiment.level", "must be in (0, 1]");

  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    expect_object(o, "oracle");
    check_keys(o, "oracle", {"enabled", "M", "step"});
    cfg.oracle.enabled = boolean(o, "enabled", "oracle", cfg.oracle.enabled);
    cfg.oracle.M = count(o, "M", "oracle", cfg.oracle.M);
    cfg.oracle.step = number(o, "step", "oracle", cfg.oracle.step);
  }
  require(cfg.oracle.M >= 1000, "oracle.M", "must be >= 1000");
  require(cfg.oracle.step > 0.0, "oracle.step", "must be positive");

  if (root.contains("condint")) {
    const json& c = root.at("condint");
    expect_object(c, "condint");
    check_keys(c, "condint", {"quad_h", "rho_step", "lambda_step"});
    cfg.condint.quad_h = optional_number(c, "quad_h", "condint", cfg.condint.quad_h);
    cfg.condint.rho_step = number(c, "rho_step", "condint", cfg.condint.rho_step);
    cfg.condint.lambda_step = number(c, "lambda_step", "condint", cfg.condint.lambda_step);
  }
  require(!cfg.condint.quad_h || *cfg.condint.quad_h > 0.0, "condint.quad_h", "must be positive");
  require(cfg.condint.rho_step > 0.0, "condint.rho_step", "must be positive");
  require(cfg.condint.lambda_step > 0.0, "condint.lambda_step", "must be positive");

  cfg.seed = count(root, "seed", "", cfg.seed);
  cfg.output = text(root, "output", "", cfg.output);
  require(!cfg.output.empty(), "output", "must be a non-empty path");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json root;
  root["model"] = {{"kappa", cfg.kappa}, {"mu", cfg.mu}, {"r", cfg.r}};
  root["thinning"] = thinning_json(cfg.thinning);
  root["geometry"] = {{"S", rect_json(cfg.S)},
                      {"W_h", cfg.W_h ? rect_json(*cfg.W_h) : json(nullptr)}};
  const auto& ex = cfg.experiment;
  json cells = json::array();
  for (const CellConfig& c : ex.cells) {
    cells.push_back({{"label", c.label},
                     {"thinning", thinning_json(c.thinning)},
                     {"W_h", c.W_h ? rect_json(*c.W_h) : json(nullptr)},
                     {"r", c.r}});
  }
  root["experiment"] = {{"N", ex.N},
                        {"n_sim", ex.n_sim},
                        {"distance", {{"d_max", ex.d_max}, {"count", ex.distance_count}}},
                        {"quad_h", optional_json(ex.quad_h)},
                        {"stat_h", ex.stat_h},
                        {"level", ex.level},
                        {"self_consistency", ex.self_consistency},
                        {"cells", cells}};
  root["oracle"] = {{"enabled", cfg.oracle.enabled}, {"M", cfg.oracle.M},
                    {"step", cfg.oracle.step}};
  root["condint"] = {{"quad_h", optional_json(cfg.condint.quad_h)},
                     {"rho_step", cfg.condint.rho_step},
                     {"lambda_step", cfg.condint.lambda_step}};
  root["seed"] = cfg.seed;
  root["output"] = cfg.output;
  return root.dump(2) + "\n";
}

RunConfig paper_table1_config() {
  RunConfig cfg;
  ThinningSpec p1;
  p1.variant = "step";
  ThinningSpec p2;
  p2.variant = "linear";
  for (const ExperimentCell& c : paper_table1_cells(cfg.kappa, cfg.mu)) {
    const bool first = c.label.rfind("p1", 0) == 0;
    cfg.experiment.cells.push_back({c.label, first ? p1 : p2, c.W_h, c.model.range()});
  }
  return cfg;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace nscond
