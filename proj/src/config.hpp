#pragma once

// JSON run configuration. Unknown keys are rejected; serialization writes
// every field with defaults filled in, so serialize(parse(text)) is a fixed
// point.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "model.hpp"

namespace nscond {

struct ThinningSpec {
  std::string variant = "step";  // constant | step | linear | grid
  double alpha = 1.0;
  double alpha1 = 0.8;
  double alpha2 = 0.2;
  double v = 0.5;
  double intercept = 1.0;
  double slope = -1.0;
  Rect extent{0.0, 0.0, 1.0, 1.0};
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  ThinningField build() const;
};

struct CellConfig {
  std::string label;
  ThinningSpec thinning;
  std::optional<Rect> W_h;
  double r = 0.09;
};

struct RunConfig {
  double kappa = 50.0;
  double mu = 40.0;
  double r = 0.09;
  ThinningSpec thinning;
  Rect S{0.0, 0.0, 1.0, 1.0};
  std::optional<Rect> W_h = Rect{0.35, 0.35, 0.65, 0.65};

  struct Experiment {
    std::size_t N = 250;
    std::size_t n_sim = 100;
    double d_max = 0.25;
    std::size_t distance_count = 64;
    std::optional<double> quad_h;
    double stat_h = 0.005;
    double level = 0.95;
    bool self_consistency = false;
    std::vector<CellConfig> cells;  // empty: the single top-level cell
  } experiment;

  struct Oracle {
    bool enabled = false;
    std::size_t M = 50000;
    double step = 0.05;  // y-grid spacing over W_h
  } oracle;

  struct Condint {
    std::optional<double> quad_h;  // internal rho field, default r / 50
    double rho_step = 0.01;        // emitted rho raster
    double lambda_step = 0.01;     // emitted lambda raster
  } condint;

  std::uint64_t seed = 1;
  std::string output = "out";

  ClusterModel model() const { return ClusterModel::make(kappa, mu, r); }
  ObservationScheme scheme() const;
  ExperimentSettings settings() const;
  std::vector<ExperimentCell> cells() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
// Configuration of the paper's six-cell grid.
RunConfig paper_table1_config();

// FNV-1a 64 of the canonical serialization.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace nscond
