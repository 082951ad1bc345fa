#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"

using namespace nscond;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("NSCOND_TEST_TMP");
  fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "nscond_tests";
  fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty configuration gives the documented defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.kappa == 50.0);
  CHECK(c.mu == 40.0);
  CHECK(c.r == 0.09);
  CHECK(c.thinning.variant == "step");
  CHECK(c.experiment.N == 250);
  CHECK(c.experiment.n_sim == 100);
  CHECK(c.experiment.distance_count == 64);
  CHECK(c.W_h);
  const auto p = c.thinning.build();
  CHECK(p({0.25, 0.5}) == 0.8);
  CHECK(p({0.75, 0.5}) == 0.2);
  CHECK(c.settings().grid == DistanceGrid::equispaced(0.25, 64));
}

TEST_CASE("serialization is a fixed point") {
  const std::string text = R"({
    "model": {"kappa": 30, "mu": 12.5, "r": 0.05},
    "thinning": {"variant": "linear", "intercept": 0.9, "slope": -0.5},
    "geometry": {"S": [0, 0, 2, 1], "W_h": [0.5, 0.2, 1.5, 0.8]},
    "experiment": {"N": 40, "n_sim": 25, "distance": {"d_max": 0.2, "count": 21},
                   "cells": [{"label": "a", "r": 0.05, "thinning": {"variant": "constant", "alpha": 0.4}}]},
    "oracle": {"enabled": true, "M": 2000},
    "seed": 77, "output": "somewhere"
  })";
  const RunConfig c = parse_config(text);
  CHECK(c.mu == 12.5);
  CHECK(c.experiment.cells.size() == 1);
  const std::string once = serialize_config(c);
  const std::string twice = serialize_config(parse_config(once));
  CHECK(once == twice);
  CHECK(config_hash(c) == config_hash(parse_config(once)));
  RunConfig other = c;
  other.seed = 78;
  CHECK(config_hash(c) != config_hash(other));
  CHECK(serialize_config(paper_table1_config()) ==
        serialize_config(parse_config(serialize_config(paper_table1_config()))));
  CHECK(paper_table1_config().cells().size() == 6);
}

TEST_CASE("configuration errors name the offending key") {
  CHECK(config_error("{\"model\": {\"kapa\": 3}}").find("model.kapa") != std::string::npos);
  CHECK(config_error("{\"model\": {\"kappa\": -3}}").find("kappa") != std::string::npos);
  CHECK(config_error("{\"model\": {\"kappa\": \"big\"}}").find("model.kappa") != std::string::npos);
  CHECK(config_error("{\"experiment\": {\"N\": 1.5}}").find("experiment.N") != std::string::npos);
  CHECK(config_error("{\"thinning\": {\"variant\": \"wavy\"}}").find("wavy") != std::string::npos);
  CHECK(config_error("{\"geometry\": {\"S\": [1, 0, 0, 1]}}").find("geometry.S") != std::string::npos);
  CHECK_FALSE(config_error("{not json").empty());
  CHECK_FALSE(config_error("[1, 2]").empty());
  CHECK_FALSE(config_error("{\"thinning\": {\"variant\": \"grid\", \"nx\": 2, \"ny\": 2, "
                           "\"values\": [0.1, 0.2, 0.3]}}").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("numbers round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("point CSV round trip and error locations") {
  const fs::path dir = scratch("points");
  const PointPattern pat{{{0.1, 0.2}, {1.0 / 3.0, 0.7}}, Region::rect({0, 0, 1, 1}), Role::Thinned};
  write_points_csv(dir / "p.csv", pat);
  CHECK(slurp(dir / "p.csv").rfind("x,y,role\n", 0) == 0);
  const auto back = read_points_csv(dir / "p.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].x == 1.0 / 3.0);
  CHECK(back[1].y == 0.7);

  spit(dir / "bare.csv", "0.5,0.5\n0.25,0.75\n");
  CHECK(read_points_csv(dir / "bare.csv").size() == 2);

  spit(dir / "bad.csv", "x,y\n0.5,0.5\n0.3,oops\n");
  try {
    read_points_csv(dir / "bad.csv");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
  }
  CHECK_THROWS_AS(read_points_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("raster CSV skips undefined cells") {
  const fs::path dir = scratch("raster");
  Raster r(Lattice::cover({0, 0, 1, 1}, 0.5), 1.0);
  r.at(1, 1) = std::nan("");
  write_raster_csv(dir / "r.csv", r);
  const std::string text = slurp(dir / "r.csv");
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("simulate and condint commands write their artifacts") {
  const fs::path dir = scratch("commands");
  RunConfig cfg = parse_config("{}");
  cfg.condint.rho_step = 0.05;
  cfg.condint.lambda_step = 0.05;
  RunOptions opts;
  opts.seed = 3;
  opts.out_dir = (dir / "sim").string();
  opts.svg = false;
  const CommandReport sim = cmd_simulate(cfg, opts);
  for (const char* f : {"parents.csv", "offspring.csv", "thinned.csv", "observed.csv",
                        "config.json", "manifest.json"}) {
    CHECK(fs::exists(dir / "sim" / f));
  }
  CHECK_FALSE(fs::exists(dir / "sim" / "simulate.svg"));

  opts.out_dir = (dir / "cond").string();
  opts.observed_path = (dir / "sim" / "observed.csv").string();
  opts.quad_h = 0.005;
  cmd_condint(cfg, opts);
  CHECK(fs::exists(dir / "cond" / "rho.csv"));
  CHECK(fs::exists(dir / "cond" / "lambda.csv"));
  CHECK(slurp(dir / "cond" / "observed.csv") == slurp(dir / "sim" / "observed.csv"));

  spit(dir / "inside_hole.csv", "x,y\n0.5,0.5\n0.1,0.1\n");
  opts.observed_path = (dir / "inside_hole.csv").string();
  opts.out_dir = (dir / "bad").string();
  try {
    cmd_condint(cfg, opts);
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("outside W") != std::string::npos);
  }
}

TEST_CASE("validate command on a tiny grid") {
  const fs::path dir = scratch("validate");
  RunConfig cfg = parse_config(R"({"experiment": {"N": 2, "n_sim": 1, "stat_h": 0.02,
                                   "distance": {"d_max": 0.2, "count": 11}}})");
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.svg = false;
  opts.workers = 1;
  const CommandReport rep = cmd_validate(cfg, opts);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "coverage.csv"));
  const fs::path cell = dir / cfg.cells().front().label;
  REQUIRE(fs::exists(cell / "curves.csv"));
  const std::string curves = slurp(cell / "curves.csv");
  CHECK(curves.rfind("replicate,kind,source,d,value", 0) == 0);
  // 2 replicates x 4 kinds x 3 sources x 11 distances
  CHECK(std::count(curves.begin(), curves.end(), '\n') == 1 + 2 * 4 * 3 * 11);
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"config_hash\"") != std::string::npos);
  CHECK(manifest.find("\"command\": \"validate\"") != std::string::npos);
}
