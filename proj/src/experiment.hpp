#pragma once

// Replicated validation experiment for one (thinning, W_h, r) cell.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "envelope.hpp"
#include "model.hpp"
#include "stats.hpp"

namespace nscond {

struct ExperimentSettings {
  std::size_t N = 250;      // outer replicates
  std::size_t n_sim = 100;  // parent simulations per replicate
  DistanceGrid grid = DistanceGrid::equispaced(0.25, 64);
  std::optional<double> quad_h;  // rho field resolution, default r / 50
  double stat_h = 0.005;         // raster for theoretical curves
  double level = 0.95;
  // Replace the true parents by a draw from Poisson(rho).
  bool self_consistency = false;
};

struct ExperimentCell {
  std::string label;
  ClusterModel model;
  ThinningField p;
  Rect S;
  Rect W_h;
};

// The six cells of the paper's grid: {p1, p2} x r in {0.05, 0.09, 0.13}.
std::vector<ExperimentCell> paper_table1_cells(double kappa = 50.0, double mu = 40.0);

inline constexpr std::size_t kKindCount = 4;
using PerKind = std::array<std::vector<double>, kKindCount>;

struct ReplicateCurves {
  std::size_t replicate = 0;
  std::size_t parents_in_S = 0;
  std::size_t observed_offspring = 0;
  PerKind observed;
  PerKind theoretical;
  PerKind simulated_mean;
  std::array<std::vector<std::vector<double>>, kKindCount> simulated;
};

struct ReplicateFailure {
  std::size_t replicate = 0;
  std::string message;
};

struct KindSummary {
  StatKind kind = StatKind::H;
  EnvelopeSet observed;
  EnvelopeSet simulated;
  EnvelopeSet theoretical;
  Coverage coverage;  // observed vs simulated
};

struct CellResult {
  std::string label;
  DistanceGrid grid;
  std::vector<ReplicateCurves> replicates;  // successful ones, in replicate order
  std::vector<ReplicateFailure> failures;
  // Present when enough replicates succeeded to form envelopes.
  std::optional<std::array<KindSummary, kKindCount>> summary;
};

std::size_t kind_index(StatKind k);

// Replicates run on `workers` threads; results are reduced in replicate
// order, so the outcome does not depend on the worker count. Throws if 5%
// or more of the replicates fail.
CellResult run_experiment(const ExperimentCell& cell, const ExperimentSettings& settings,
                          Seed seed, std::size_t cell_index, unsigned workers);

}  // namespace nscond
