// nscond: simulate / condint / validate / reproduce-table1 / config.
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "nscond/nscond.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 0;
  bool oracle = false;
  double quad_h = 0.0;
  bool no_svg = false;
  std::string observed;
  bool rho_kappa = false;
  std::size_t replicates = 0;
  std::size_t sims = 0;
};

int exit_code(nsc_status s) {
  if (s == NSC_OK) return 0;
  return s == NSC_ERR_CONFIG ? 1 : 2;
}

int report(nsc_status s, const char* what) {
  if (s != NSC_OK) std::fprintf(stderr, "nscond %s: %s\n", what, nsc_last_error());
  return exit_code(s);
}

nsc_status load(const Flags& f, bool table1_defaults, nsc_config** cfg) {
  if (!f.config.empty()) return nsc_config_load(f.config.c_str(), cfg);
  if (table1_defaults) return nsc_config_paper_table1(cfg);
  return nsc_config_parse("{}", cfg);
}

using Command = nsc_status (*)(const nsc_config*, const nsc_run_options*, char**);

int run(const Flags& f, Command cmd, const char* name, bool table1_defaults) {
  nsc_config* cfg = nullptr;
  nsc_status s = load(f, table1_defaults, &cfg);
  if (s != NSC_OK) return report(s, name);

  nsc_run_options opts;
  nsc_run_options_init(&opts);
  if (f.seed) {
    opts.seed = *f.seed;
    opts.has_seed = 1;
  }
  opts.out_dir = f.out.empty() ? nullptr : f.out.c_str();
  opts.workers = f.workers;
  opts.oracle = f.oracle;
  opts.quad_h = f.quad_h;
  opts.svg = !f.no_svg;
  opts.observed = f.observed.empty() ? nullptr : f.observed.c_str();
  opts.force_rho_kappa = f.rho_kappa;
  opts.replicates = f.replicates;
  opts.sims = f.sims;

  char* summary = nullptr;
  s = cmd(cfg, &opts, &summary);
  nsc_config_free(cfg);
  if (summary) {
    std::fputs(summary, stdout);
    nsc_string_free(summary);
  }
  return report(s, name);
}

int print_config(const Flags& f, bool table1_defaults) {
  nsc_config* cfg = nullptr;
  nsc_status s = load(f, table1_defaults, &cfg);
  if (s != NSC_OK) return report(s, "config");
  char* text = nullptr;
  s = nsc_config_serialize(cfg, &text);
  nsc_config_free(cfg);
  if (text) {
    std::fputs(text, stdout);
    nsc_string_free(text);
  }
  return report(s, "config");
}

void common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run configuration");
  app->add_option("--seed", f.seed, "Master seed (overrides the config)");
  app->add_option("--out", f.out, "Output directory (overrides the config)");
  app->add_option("--workers", f.workers, "Worker threads, 0 = available parallelism");
  app->add_option("--quad-h", f.quad_h, "Quadrature cell size")->check(CLI::PositiveNumber);
  app->add_flag("--no-svg", f.no_svg, "Skip SVG figures");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional intensities of the thinned Matern cluster process"};
  app.set_version_flag("--version", std::string(nsc_version()));
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "Simulate parents, offspring and thinned offspring");
  common(sim, f);

  auto* cond = app.add_subcommand("condint", "Conditional parent and offspring intensity rasters");
  common(cond, f);
  cond->add_option("--observed", f.observed, "CSV of observed points (x,y); simulated if absent");
  cond->add_flag("--oracle", f.oracle, "Also write the Monte Carlo reference raster");
  cond->add_flag("--rho-kappa", f.rho_kappa, "Debug: fix the parent intensity to kappa");

  auto* val = app.add_subcommand("validate", "Envelope validation experiment and coverage rates");
  common(val, f);
  val->add_option("--replicates", f.replicates, "Override experiment.N");
  val->add_option("--sims", f.sims, "Override experiment.n_sim");

  auto* tab = app.add_subcommand("reproduce-table1", "Validation on the paper's six-cell grid");
  common(tab, f);
  tab->add_option("--replicates", f.replicates, "Override experiment.N");
  tab->add_option("--sims", f.sims, "Override experiment.n_sim");

  auto* conf = app.add_subcommand("config", "Print the canonical configuration");
  conf->add_option("--config", f.config, "JSON run configuration");
  bool table1 = false;
  conf->add_flag("--table1", table1, "Start from the paper's grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*sim) return run(f, nsc_cmd_simulate, "simulate", false);
  if (*cond) return run(f, nsc_cmd_condint, "condint", false);
  if (*val) return run(f, nsc_cmd_validate, "validate", false);
  if (*tab) return run(f, nsc_cmd_reproduce_table1, "reproduce-table1", true);
  if (*conf) return print_config(f, table1);
  return 1;
}
