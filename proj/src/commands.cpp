#include "commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "io.hpp"

namespace nscond {

namespace fs = std::filesystem;

namespace {

struct Run {
  const char* command;
  RunConfig cfg;
  const RunOptions& opts;
  fs::path dir;
  Seed seed;
  CommandReport report;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Run(const char* cmd, const RunConfig& c, const RunOptions& o)
      : command(cmd), cfg(c), opts(o), dir(o.out_dir.value_or(c.output)), seed(o.seed.value_or(c.seed)) {
    cfg.seed = seed;
    ensure_directory(dir);
    report.out_dir = dir.string();
  }

  fs::path file(const std::string& rel) {
    report.files.push_back(rel);
    const fs::path p = dir / rel;
    if (p.has_parent_path()) ensure_directory(p.parent_path());
    return p;
  }

  void say(const std::string& line) {
    report.lines.push_back(line);
    if (opts.log) opts.log(line);
  }

  void write_config() {
    const fs::path p = file("config.json");
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << serialize_config(cfg);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
  }

  CommandReport finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::uint64_t hash = config_hash(cfg);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    std::uint64_t id = hash ^ (seed * 0x9e3779b97f4a7c15ull);
    for (const char* c = command; *c; ++c) id = (id ^ static_cast<unsigned char>(*c)) * 1099511628211ull;
    char run_id[17];
    std::snprintf(run_id, sizeof run_id, "%016llx", static_cast<unsigned long long>(id));
    nlohmann::ordered_json m;
    m["run_id"] = run_id;
    m["command"] = command;
    m["config_hash"] = hex;
    m["seed"] = seed;
    m["files"] = report.files;
    m["wall_clock_seconds"] = wall;
    m["version"] = NSCOND_VERSION;
    const fs::path p = dir / "manifest.json";
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return report;
  }
};

std::string real(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void draw_pattern(Svg& svg, const PointPattern& pts, double radius, const std::string& colour,
                  double opacity) {
  for (const Point& p : pts.points) svg.circle(p, radius, colour, opacity);
}

PointPattern pattern_of(std::vector<Point> pts, const Region& carrier, Role role) {
  return PointPattern{std::move(pts), carrier, role};
}

unsigned worker_count(const RunOptions& opts) {
  if (opts.workers > 0) return opts.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

CommandReport cmd_simulate(const RunConfig& cfg, const RunOptions& opts) {
  Run run("simulate", cfg, opts);
  const ObservationScheme scheme = cfg.scheme();
  const ClusterModel model = cfg.model();
  const ThinningField p = cfg.thinning.build();
  Rng rng = make_rng(run.seed);
  const ClusterRealization real_ = sample_thinned_cluster(model, p, scheme, rng);
  PointPattern observed = real_.thinned.restricted_to(scheme.W);

  run.write_config();
  write_points_csv(run.file("parents.csv"), real_.parents);
  write_points_csv(run.file("offspring.csv"), real_.offspring);
  write_points_csv(run.file("thinned.csv"), real_.thinned);
  write_points_csv(run.file("observed.csv"), observed);

  if (opts.svg) {
    Svg svg(640, 640, scheme.S_dilated.bbox());
    svg.rect(cfg.S, "black", "none");
    if (cfg.W_h) svg.rect(*cfg.W_h, "black", "#dddddd", 0.6);
    draw_pattern(svg, real_.offspring, 1.2, "#999999", 0.6);
    draw_pattern(svg, observed, 1.6, "#1f77b4", 0.9);
    draw_pattern(svg, real_.parents, 3.0, "#d62728", 1.0);
    svg.text_px(50, 20,
                "parents (red), offspring (grey), observed thinned offspring in W (blue)", 12);
    svg.save(run.file("simulate.svg"));
  }
  run.say("parents: " + std::to_string(real_.parents.size()) +
          ", offspring in S: " + std::to_string(real_.offspring.size()) +
          ", thinned: " + std::to_string(real_.thinned.size()) +
          ", observed in W: " + std::to_string(observed.size()));
  return run.finish();
}

CommandReport cmd_condint(const RunConfig& cfg, const RunOptions& opts) {
  Run run("condint", cfg, opts);
  const ObservationScheme scheme = cfg.scheme();
  const ClusterModel model = cfg.model();
  const ThinningField p = cfg.thinning.build();
  const double r = model.range();

  PointPattern obs = pattern_of({}, scheme.W, Role::Thinned);
  if (opts.observed_path) {
    obs.points = read_points_csv(*opts.observed_path);
    std::vector<Point> outside;
    for (const Point& x : obs.points) {
      if (!scheme.W.contains(x)) outside.push_back(x);
    }
    if (!outside.empty()) {
      std::string msg = std::to_string(outside.size()) + " observed point(s) outside W:";
      for (std::size_t i = 0; i < std::min<std::size_t>(outside.size(), 10); ++i) {
        msg += " (" + format_real(outside[i].x) + ", " + format_real(outside[i].y) + ")";
      }
      if (outside.size() > 10) msg += " ...";
      throw InvalidArgument(msg);
    }
  } else {
    Rng rng = make_rng(run.seed);
    obs = sample_thinned_cluster(model, p, scheme, rng).thinned.restricted_to(scheme.W);
  }
  run.write_config();
  write_points_csv(run.file("observed.csv"), obs);

  const double qh = opts.quad_h.value_or(cfg.condint.quad_h.value_or(r / 50.0));
  const QuadratureSpec q(qh);
  const Rect outer = cfg.S.expanded(r);

  // Fine field used inside the lambda integrals.
  const Lattice fine = Lattice::cover(outer, qh);
  const CondParentField rho =
      opts.rho_kappa ? constant_rho_field(fine, model.kappa)
                     : build_rho_field(ExposureMap::build(model, p, scheme.W, fine, q), obs, model);

  // Emitted rho raster: point values at the centres of a coarser lattice.
  const Lattice coarse = Lattice::cover(outer, cfg.condint.rho_step);
  Raster rho_out = opts.rho_kappa
                       ? Raster(coarse, model.kappa)
                       : build_rho_field(ExposureMap::build(model, p, scheme.W, coarse, q), obs,
                                         model)
                             .values;
  for (std::size_t j = 0; j < coarse.ny; ++j) {
    for (std::size_t i = 0; i < coarse.nx; ++i) {
      if (!scheme.S_dilated.contains(coarse.center(i, j))) rho_out.at(i, j) = std::nan("");
    }
  }
  write_raster_csv(run.file("rho.csv"), rho_out);

  const Rect target = cfg.W_h.value_or(cfg.S);
  const Lattice lam_lat = Lattice::cover(target, cfg.condint.lambda_step);
  const CondIntensityField lam =
      lambda_field(lam_lat, Region::rect(target), rho, model, p, scheme, q);
  write_raster_csv(run.file("lambda.csv"), lam.values);

  double lam_sum = 0.0;
  std::size_t lam_n = 0;
  for (double v : lam.values.values) {
    if (!std::isnan(v)) {
      lam_sum += v;
      ++lam_n;
    }
  }
  run.say("observed points: " + std::to_string(obs.size()) + ", rho " +
          (opts.rho_kappa ? "forced to kappa" : "from the approximation") +
          ", max rho " + real(rho.values.max_value(), 2) + ", mean lambda over target " +
          real(lam_n ? lam_sum / static_cast<double>(lam_n) : 0.0, 2));

  if (opts.svg) {
    Svg svg(640, 640, outer);
    const double vmax = std::max(rho_out.max_value(), 1e-300);
    for (std::size_t j = 0; j < coarse.ny; ++j) {
      for (std::size_t i = 0; i < coarse.nx; ++i) {
        const double v = rho_out.at(i, j);
        if (std::isnan(v)) continue;
        const Point c = coarse.center(i, j);
        const Rect cell{c.x - coarse.dx / 2, c.y - coarse.dy / 2, c.x + coarse.dx / 2,
                        c.y + coarse.dy / 2};
        svg.rect(cell, "none", "#d62728", std::sqrt(v / vmax));
      }
    }
    svg.rect(cfg.S, "black", "none");
    if (cfg.W_h) svg.rect(*cfg.W_h, "black", "none");
    draw_pattern(svg, obs, 1.4, "#1f77b4", 0.9);
    svg.text_px(50, 20, "conditional parent intensity (red, sqrt scale), observed points (blue)");
    svg.save(run.file("rho.svg"));
  }

  if (opts.oracle || cfg.oracle.enabled) {
    const Lattice grid = Lattice::cover(target, cfg.oracle.step);
    std::vector<Point> ys;
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) ys.push_back(grid.center(i, j));
    }
    OracleDiagnostics diag;
    const auto est = importance_oracle(ys, obs, model, p, scheme, cfg.oracle.M, run.seed, &diag);
    Raster values(grid, 0.0);
    std::vector<double> se(grid.size());
    for (std::size_t k = 0; k < est.size(); ++k) {
      values.values[k] = est[k].value;
      se[k] = est[k].std_error;
    }
    write_raster_csv(run.file("oracle.csv"), values, &se);
    run.say("oracle: " + std::to_string(diag.nonzero_weights) + " of " +
            std::to_string(diag.samples) + " samples with nonzero weight, ESS " +
            real(diag.effective_sample_size, 1));
  }
  return run.finish();
}

namespace {

void write_cell(Run& run, const ExperimentCell& cell, const CellResult& res) {
  const std::string d = cell.label + "/";
  const DistanceGrid& g = res.grid;
  {
    CsvWriter csv(run.file(d + "curves.csv"), {"replicate", "kind", "source", "d", "value"});
    for (const ReplicateCurves& rc : res.replicates) {
      for (StatKind kind : kAllKinds) {
        const std::size_t k = kind_index(kind);
        const std::pair<const char*, const std::vector<double>*> rows[] = {
            {"empirical-observed", &rc.observed[k]},
            {"empirical-simulated-mean", &rc.simulated_mean[k]},
            {"theoretical", &rc.theoretical[k]}};
        for (const auto& [source, values] : rows) {
          for (std::size_t i = 0; i < g.size(); ++i) {
            csv.cell(rc.replicate).cell(kind_name(kind)).cell(std::string_view(source));
            csv.cell(g.d[i]).cell((*values)[i]);
            csv.end_row();
          }
        }
      }
    }
    csv.close();
  }
  {
    CsvWriter csv(run.file(d + "failures.csv"), {"replicate", "message"});
    for (const ReplicateFailure& f : res.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      csv.cell(f.replicate).cell(std::string_view(msg));
      csv.end_row();
    }
    csv.close();
  }
  if (!res.summary) {
    run.say(cell.label + ": " + std::to_string(res.replicates.size()) +
            " replicates, fewer than " + std::to_string(kMinEnvelopeCurves) +
            "; envelopes and coverage skipped");
    return;
  }
  const auto& summary = *res.summary;
  {
    CsvWriter csv(run.file(d + "envelopes.csv"),
                  {"kind", "source", "d", "lower", "upper", "count"});
    for (const KindSummary& ks : summary) {
      for (const EnvelopeSet* e : {&ks.observed, &ks.simulated, &ks.theoretical}) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          csv.cell(kind_name(e->kind)).cell(source_name(e->source)).cell(g.d[i]);
          csv.cell(e->lower[i]).cell(e->upper[i]).cell(e->count);
          csv.end_row();
        }
      }
    }
    csv.close();
  }
  {
    CsvWriter csv(run.file(d + "coverage.csv"), {"kind", "tau1", "tau2"});
    for (const KindSummary& ks : summary) {
      csv.cell(kind_name(ks.kind)).cell(ks.coverage.tau1).cell(ks.coverage.tau2);
      csv.end_row();
    }
    csv.close();
  }
  {
    CsvWriter csv(run.file(d + "tau_curves.csv"), {"kind", "d", "tau1", "tau2"});
    for (const KindSummary& ks : summary) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        csv.cell(kind_name(ks.kind)).cell(g.d[i]);
        csv.cell(ks.coverage.tau1_d[i]).cell(ks.coverage.tau2_d[i]);
        csv.end_row();
      }
    }
    csv.close();
  }
  if (run.opts.svg) {
    for (const KindSummary& ks : summary) {
      double ymax = 0.0;
      for (const EnvelopeSet* e : {&ks.observed, &ks.simulated, &ks.theoretical}) {
        ymax = std::max(ymax, *std::max_element(e->upper.begin(), e->upper.end()));
      }
      if (!(ymax > 0.0)) ymax = 1.0;
      Svg svg(640, 480, Rect{0.0, 0.0, g.max(), ymax});
      svg.band(g.d, ks.theoretical.lower, ks.theoretical.upper, "#888888", 0.35);
      svg.band(g.d, ks.observed.lower, ks.observed.upper, "#d62728", 0.35);
      svg.band(g.d, ks.simulated.lower, ks.simulated.upper, "#1f77b4", 0.25);
      std::vector<Point> t1;
      std::vector<Point> t2;
      for (std::size_t i = 0; i < g.size(); ++i) {
        t1.push_back({g.d[i], ks.coverage.tau1_d[i] / 100.0 * ymax});
        t2.push_back({g.d[i], ks.coverage.tau2_d[i] / 100.0 * ymax});
      }
      svg.polyline(t1, "black", 1.5);
      svg.polyline(t2, "black", 1.5, "5,4");
      svg.axes("d", std::string(kind_name(ks.kind)));
      svg.text_px(100, 20,
                  cell.label + " " + std::string(kind_name(ks.kind)) +
                      ": observed (red), simulated (blue), theoretical (grey); tau1 solid, "
                      "tau2 dashed, top = 100%",
                  11);
      svg.save(run.file(d + std::string(kind_name(ks.kind)) + ".svg"));
    }
  }
  std::string line = cell.label + ":";
  for (const KindSummary& ks : summary) {
    line += " " + std::string(kind_name(ks.kind)) + " " + real(ks.coverage.tau1, 2) + "/" +
            real(ks.coverage.tau2, 2);
  }
  run.say(line);
}

CommandReport validate_cells(Run& run, const std::vector<ExperimentCell>& cells) {
  ExperimentSettings settings = run.cfg.settings();
  if (run.opts.replicates) settings.N = *run.opts.replicates;
  if (run.opts.sims) settings.n_sim = *run.opts.sims;
  if (run.opts.quad_h) settings.quad_h = *run.opts.quad_h;
  run.cfg.experiment.N = settings.N;
  run.cfg.experiment.n_sim = settings.n_sim;
  run.cfg.experiment.quad_h = settings.quad_h;
  run.write_config();
  const unsigned workers = worker_count(run.opts);

  struct Row {
    std::string label;
    std::array<Coverage, kKindCount> cov;
  };
  std::vector<Row> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CellResult res = run_experiment(cells[c], settings, run.seed, c, workers);
    write_cell(run, cells[c], res);
    if (res.summary) {
      Row row{cells[c].label, {}};
      for (const KindSummary& ks : *res.summary) row.cov[kind_index(ks.kind)] = ks.coverage;
      rows.push_back(std::move(row));
    }
  }

  CsvWriter cov(run.file("coverage.csv"), {"cell", "kind", "tau1", "tau2"});
  for (const Row& row : rows) {
    for (StatKind kind : kAllKinds) {
      const Coverage& c = row.cov[kind_index(kind)];
      cov.cell(std::string_view(row.label)).cell(kind_name(kind)).cell(c.tau1).cell(c.tau2);
      cov.end_row();
    }
  }
  cov.close();

  std::vector<std::string> header{"statistic"};
  for (const Row& row : rows) header.push_back(row.label);
  CsvWriter table(run.file("table1.csv"), header);
  for (StatKind kind : kAllKinds) {
    for (int which = 1; which <= 2; ++which) {
      table.cell(std::string_view("tau" + std::to_string(which) + "(" +
                                  std::string(kind_name(kind)) + ")"));
      for (const Row& row : rows) {
        const Coverage& c = row.cov[kind_index(kind)];
        table.cell(which == 1 ? c.tau1 : c.tau2);
      }
      table.end_row();
    }
  }
  table.close();
  return run.finish();
}

}  // namespace

CommandReport cmd_validate(const RunConfig& cfg, const RunOptions& opts) {
  Run run("validate", cfg, opts);
  return validate_cells(run, cfg.cells());
}

CommandReport cmd_reproduce_table1(const RunConfig& cfg, const RunOptions& opts) {
  RunConfig pinned = paper_table1_config();
  pinned.experiment.N = cfg.experiment.N;
  pinned.experiment.n_sim = cfg.experiment.n_sim;
  pinned.experiment.quad_h = cfg.experiment.quad_h;
  pinned.experiment.stat_h = cfg.experiment.stat_h;
  pinned.experiment.d_max = cfg.experiment.d_max;
  pinned.experiment.distance_count = cfg.experiment.distance_count;
  pinned.seed = cfg.seed;
  pinned.output = cfg.output;
  Run run("reproduce-table1", pinned, opts);
  return validate_cells(run, run.cfg.cells());
}

}  // namespace nscond
