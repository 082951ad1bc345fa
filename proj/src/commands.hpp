#pragma once

// The four CLI workflows, writing their artifacts under an output directory.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace nscond {

struct RunOptions {
  std::optional<Seed> seed;            // overrides cfg.seed
  std::optional<std::string> out_dir;  // overrides cfg.output
  unsigned workers = 0;                // 0: available parallelism
  bool oracle = false;
  std::optional<double> quad_h;
  bool rho_kappa = false;  // condint: force rho = kappa
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> sims;
  bool svg = true;
  std::optional<std::string> observed_path;  // condint input pattern
  std::function<void(const std::string&)> log;
};

struct CommandReport {
  std::string out_dir;
  std::vector<std::string> files;  // relative to out_dir
  std::vector<std::string> lines;  // human-readable summary
};

CommandReport cmd_simulate(const RunConfig& cfg, const RunOptions& opts);
CommandReport cmd_condint(const RunConfig& cfg, const RunOptions& opts);
CommandReport cmd_validate(const RunConfig& cfg, const RunOptions& opts);
// cmd_validate on the paper's grid, keeping cfg's experiment sizes.
CommandReport cmd_reproduce_table1(const RunConfig& cfg, const RunOptions& opts);

}  // namespace nscond
