// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Usage: nscond_acceptance [--workdir DIR] [--only NAME]...

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "condint.hpp"
#include "config.hpp"
#include "experiment.hpp"
#include "geom2d.hpp"
#include "model.hpp"

using namespace nscond;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;  // printed under the verdict

  void fail(const std::string& why) {
    pass = false;
    notes.push_back(why);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

struct Context {
  fs::path workdir;
  unsigned workers = 1;
};

struct Criterion {
  std::string name;
  std::function<void(const Context&, Outcome&)> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Moments {
  double n = 0, sum = 0, sum2 = 0;
  void add(double v) {
    n += 1;
    sum += v;
    sum2 += v * v;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt(std::max(0.0, sum2 / n - mean() * mean()) / (n - 1)); }
};

const Rect kUnit{0, 0, 1, 1};
const Rect kHole{0.35, 0.35, 0.65, 0.65};

ObservationScheme paper_scheme(double r) {
  return ObservationScheme::with_hole(kUnit, kHole, r, r / 50);
}

// ---------------------------------------------------------------------------

void normalization(const Context&, Outcome& out) {
  const ClusterModel m = ClusterModel::make(50, 40, 0.09);
  const auto p1 = ThinningField::step(0.8, 0.2, 0.5);
  const auto scheme = paper_scheme(0.09);
  const QuadratureSpec q(0.09 / 50);
  std::vector<Point> ys;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) ys.push_back({0.125 + 0.25 * i, 0.125 + 0.25 * j});
  }
  std::vector<Moments> acc(ys.size());
  for (Seed s = 0; s < 2000; ++s) {
    Rng rng = make_rng(1001, s);
    const auto real = sample_thinned_cluster(m, p1, scheme, rng);
    const auto obs = real.thinned.restricted_to(scheme.W);
    for (std::size_t g = 0; g < ys.size(); ++g) {
      acc[g].add(rho_approx(ys[g], obs, m, p1, scheme, q));
    }
  }
  double worst = 0.0;
  for (std::size_t g = 0; g < ys.size(); ++g) {
    const double z = (acc[g].mean() - 50.0) / acc[g].se();
    worst = std::max(worst, std::abs(z));
    if (std::abs(z) > 3.0) {
      out.fail(fmt("y=(%.3f,%.3f): mean %.4f, se %.4f, z=%.2f", ys[g].x, ys[g].y, acc[g].mean(),
                   acc[g].se(), z));
    }
  }
  out.note(fmt("16 points, 2000 replicates, max |z| = %.2f", worst));
}

void campbell(const Context&, Outcome& out) {
  const ClusterModel m = ClusterModel::make(50, 40, 0.09);
  const auto p1 = ThinningField::step(0.8, 0.2, 0.5);
  const auto scheme = paper_scheme(0.09);
  const double r = m.range();
  const QuadratureSpec q(r / 50);
  const std::vector<Point> xs{{0.5, 0.5}, {0.25, 0.5}, {0.75, 0.5}};
  std::vector<ExposureMap> maps;
  for (Point x : xs) {
    const Lattice lat = Lattice::cover(Rect{x.x - r, x.y - r, x.x + r, x.y + r}.expanded(q.h), q.h);
    maps.push_back(ExposureMap::build(m, p1, scheme.W, lat, q));
  }
  std::vector<Moments> acc(xs.size());
  for (Seed s = 0; s < 2000; ++s) {
    Rng rng = make_rng(2002, s);
    const auto real = sample_thinned_cluster(m, p1, scheme, rng);
    const auto obs = real.thinned.restricted_to(scheme.W);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const CondParentField rho = build_rho_field(maps[i], obs, m);
      acc[i].add(lambda_cond(xs[i], rho, m, p1, scheme, q));
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double expected = intensity(m, p1, xs[i]);
    const double z = (acc[i].mean() - expected) / acc[i].se();
    const std::string line = fmt("x_o=(%.2f,%.2f): mean %.2f, expected %.0f, se %.2f, z=%.2f",
                                 xs[i].x, xs[i].y, acc[i].mean(), expected, acc[i].se(), z);
    if (std::abs(z) > 3.0) {
      out.fail(line);
    } else {
      out.note(line);
    }
  }
}

void oracle_agreement(const Context&, Outcome& out) {
  const ClusterModel m = ClusterModel::make(80, 1.5, 0.1);
  const auto p1 = ThinningField::step(0.8, 0.2, 0.5);
  const Region W = Region::rect({0.3, 0.3, 0.7, 0.7});
  const auto scheme = ObservationScheme::make(W, W, 0.1, 0.002);
  const QuadratureSpec fine(0.1 / 200);
  const std::vector<Point> all_obs{{0.45, 0.5}, {0.55, 0.52}, {0.4, 0.62}};
  std::vector<Point> ys;
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) ys.push_back({0.35 + 0.075 * i, 0.35 + 0.075 * j});
  }
  double worst = 0.0;
  for (std::size_t n = 0; n <= 3; ++n) {
    const PointPattern obs{std::vector<Point>(all_obs.begin(), all_obs.begin() + n), W,
                           Role::Thinned};
    OracleDiagnostics diag;
    const auto est = importance_oracle(ys, obs, m, p1, scheme, 50000, 3003 + n, &diag);
    const BaudinPosterior exact(obs, m, p1, W, fine);
    for (std::size_t g = 0; g < ys.size(); ++g) {
      const double e = exact(ys[g]);
      if (n == 0) {
        const double closed = m.kappa * std::exp(-m.mu * exposure(ys[g], m, p1, W, fine));
        const double approx = rho_approx(ys[g], obs, m, p1, scheme, fine);
        if (std::abs(e - closed) > 1e-10 || std::abs(approx - closed) > 1e-10 ||
            std::abs(est[g].value - closed) > 1e-10) {
          out.fail(fmt("n=0 y=(%.3f,%.3f): exact %.12g, approx %.12g, oracle %.12g, closed %.12g",
                       ys[g].x, ys[g].y, e, approx, est[g].value, closed));
        }
        continue;
      }
      if (est[g].std_error == 0.0) {
        // y out of reach of every observation: both reduce to the prior term
        if (std::abs(est[g].value - e) > 1e-9 * e) {
          out.fail(fmt("n=%zu y=(%.3f,%.3f): exact %.6g vs oracle %.6g with zero se", n, ys[g].x,
                       ys[g].y, e, est[g].value));
        }
        continue;
      }
      const double z = (est[g].value - e) / est[g].std_error;
      worst = std::max(worst, std::abs(z));
      if (std::abs(z) > 3.0) {
        out.fail(fmt("n=%zu y=(%.3f,%.3f): exact %.4f, oracle %.4f +- %.4f, z=%.2f", n, ys[g].x,
                     ys[g].y, e, est[g].value, est[g].std_error, z));
      }
    }
    out.note(fmt("n=%zu: ESS %.0f of %zu", n, diag.effective_sample_size, diag.samples));
  }
  out.note(fmt("max |z| over n=1..3 = %.2f", worst));
}

void matern_equivalence(const Context&, Outcome& out) {
  const ClusterModel m = ClusterModel::make(50, 40, 0.09);
  const auto p1 = ThinningField::step(0.8, 0.2, 0.5);
  const auto scheme = paper_scheme(0.09);
  const QuadratureSpec q(0.09 / 50);
  const auto obs = sample_thinned_cluster(m, p1, scheme, Seed{4004}).thinned.restricted_to(scheme.W);
  const Lattice lat = Lattice::cover(kUnit.expanded(0.09), q.h);
  const CondParentField rho = build_rho_field(ExposureMap::build(m, p1, scheme.W, lat, q), obs, m);
  double worst = 0.0;
  for (int j = 0; j < 20; ++j) {
    for (int i = 0; i < 20; ++i) {
      const Point x{0.025 + 0.05 * i, 0.025 + 0.05 * j};
      const double g = lambda_cond(x, rho, m, p1, scheme, q);
      const double s = lambda_cond_matern(x, rho, m, p1, scheme, q);
      const double rel = std::abs(s - g) / std::max(std::abs(g), 1e-300);
      worst = std::max(worst, rel);
      if (rel > 1e-3) out.fail(fmt("x_o=(%.3f,%.3f): generic %.8g, disc form %.8g", x.x, x.y, g, s));
    }
  }
  out.note(fmt("400 points, max relative difference %.2e", worst));
}

std::map<std::string, std::array<double, 8>> paper_table1() {
  // columns: tau1 H, tau2 H, tau1 E, tau2 E, tau1 Bin, tau2 Bin, tau1 Bout, tau2 Bout
  return {
      {"p1_r0.05", {88.04, 53.66, 97.30, 67.75, 100.00, 87.75, 100.00, 81.63}},
      {"p1_r0.09", {93.48, 64.82, 97.40, 71.43, 99.86, 78.21, 100.00, 72.37}},
      {"p1_r0.13", {98.73, 69.81, 99.91, 74.68, 100.00, 81.69, 100.00, 74.30}},
      {"p2_r0.05", {90.07, 58.31, 97.72, 70.11, 100.00, 84.36, 100.00, 78.94}},
      {"p2_r0.09", {96.83, 68.22, 96.24, 69.63, 100.00, 88.02, 100.00, 70.43}},
      {"p2_r0.13", {99.37, 77.97, 90.65, 79.14, 100.00, 85.92, 98.57, 69.06}},
  };
}

void table1_reduced(const Context& ctx, Outcome& out) {
  ExperimentSettings s;
  s.N = 100;
  s.n_sim = 50;
  const auto paper = paper_table1();
  const auto cells = paper_table1_cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CellResult res = run_experiment(cells[c], s, 5005, c, ctx.workers);
    if (!res.summary) {
      out.fail(cells[c].label + ": too few replicates for envelopes");
      continue;
    }
    const auto& ref = paper.at(cells[c].label);
    std::string row = cells[c].label + ":";
    for (const KindSummary& ks : *res.summary) {
      const std::size_t k = kind_index(ks.kind);
      const double t1 = ks.coverage.tau1, t2 = ks.coverage.tau2;
      row += fmt(" %s %.2f/%.2f", std::string(kind_name(ks.kind)).c_str(), t1, t2);
      const std::string where = cells[c].label + " " + std::string(kind_name(ks.kind));
      if (t1 < t2) out.fail(where + fmt(": tau1 %.2f < tau2 %.2f", t1, t2));
      if ((ks.kind == StatKind::Binner || ks.kind == StatKind::Bouter) && t1 < 95.0) {
        out.fail(where + fmt(": tau1 %.2f < 95", t1));
      }
      if (ks.kind == StatKind::H && std::abs(t1 - ref[2 * k]) > 10.0) {
        out.fail(where + fmt(": tau1 %.2f vs %.2f in the paper", t1, ref[2 * k]));
      }
      if (t2 < 50.0 || t2 > 95.0) out.fail(where + fmt(": tau2 %.2f outside [50, 95]", t2));
    }
    if (!res.failures.empty()) row += fmt(" (%zu failed replicates)", res.failures.size());
    out.note(row);
  }
}

void self_consistency(const Context& ctx, Outcome& out) {
  ExperimentSettings s;
  s.N = 50;
  s.n_sim = 50;
  s.self_consistency = true;
  const auto cells = paper_table1_cells();
  const ExperimentCell& cell = cells[1];  // p1, r = 0.09
  const CellResult res = run_experiment(cell, s, 6006, 1, ctx.workers);
  if (!res.summary) {
    out.fail("too few replicates for envelopes");
    return;
  }
  std::string row = cell.label + ":";
  for (const KindSummary& ks : *res.summary) {
    const double t1 = ks.coverage.tau1, t2 = ks.coverage.tau2;
    row += fmt(" %s %.2f/%.2f", std::string(kind_name(ks.kind)).c_str(), t1, t2);
    if (t1 < 95.0 || t2 < 95.0) {
      out.fail(std::string(kind_name(ks.kind)) + fmt(": tau1 %.2f, tau2 %.2f (need both >= 95)", t1, t2));
    }
  }
  out.note(row);
}

std::map<std::string, std::string> csv_files(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = s.str();
  }
  return files;
}

void determinism(const Context& ctx, Outcome& out) {
  RunConfig cfg = parse_config(R"({"experiment": {"N": 24, "n_sim": 20, "stat_h": 0.01,
                                   "distance": {"d_max": 0.25, "count": 26}}, "seed": 7007})");
  std::map<std::string, std::string> reference;
  for (unsigned workers : {1u, 3u}) {
    const fs::path dir = ctx.workdir / ("determinism_w" + std::to_string(workers));
    fs::remove_all(dir);
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.workers = workers;
    opts.svg = false;
    cmd_validate(cfg, opts);
    const auto files = csv_files(dir);
    if (workers == 1) {
      reference = files;
      out.note(fmt("%zu CSV files compared", files.size()));
      if (files.empty()) out.fail("no CSV output");
      continue;
    }
    if (files.size() != reference.size()) out.fail("different file sets");
    for (const auto& [name, text] : reference) {
      const auto it = files.find(name);
      if (it == files.end() || it->second != text) out.fail(name + " differs between worker counts");
    }
  }
}

void geometry(const Context&, Outcome& out) {
  auto cap = [](double R, double h) {
    if (h >= R) return 0.0;
    return R * R * std::acos(h / R) - h * std::sqrt(R * R - h * h);
  };
  const double R = 0.09;
  const QuadratureSpec q(R / 100);
  double worst = 0.0;
  auto check = [&](const std::string& what, double got, double expected) {
    const double err = std::abs(got - expected);
    worst = std::max(worst, err);
    if (err > 1e-4) out.fail(what + fmt(": %.8f vs %.8f", got, expected));
  };
  for (double h : {-0.08, -0.03, 0.0, 0.02, 0.07}) {
    const Disc d{{0.5, 0.5}, R};
    const Region half = Region::rect({-10, -10, 0.5 + h, 10});
    const double expected = kPi * R * R - cap(R, h);
    check(fmt("half-plane h=%.2f exact", h), *disc_region_measure_exact(d, half), expected);
    check(fmt("half-plane h=%.2f quadrature", h), disc_region_measure(d, half, q), expected);
  }
  const Region W = subtract(Region::rect(kUnit), Region::rect(kHole));
  for (double gap : {0.0, 0.03, 0.06, 0.1}) {
    const Disc d{{0.35 - gap, 0.5}, R};
    const double expected = kPi * R * R - cap(R, gap);
    check(fmt("window gap=%.2f exact", gap), *disc_region_measure_exact(d, W), expected);
    check(fmt("window gap=%.2f quadrature", gap), disc_region_measure(d, W, q), expected);
  }
  check("corner quarter disc", disc_region_measure(Disc{{0, 0}, R}, W, q), kPi * R * R / 4);
  out.note(fmt("max absolute error %.2e", worst));

  // convergence of the midpoint rule as h halves
  const Region box = Region::rect({0, 0, 1, 0.7});
  auto f = [](Point p) { return std::exp(p.x) * std::cos(2 * p.y); };
  const double smooth = (std::exp(1.0) - 1.0) * std::sin(1.4) / 2.0;
  const Region halfdisc = intersect(Region::disc({{0.5, 0.5}, 0.1}), Region::rect({0.5, 0, 1, 1}));
  const double half_area = kPi * 0.01 / 2;
  std::string ratios = "ratios:";
  double prev_s = std::abs(integrate(f, box, QuadratureSpec(0.1)) - smooth);
  double prev_d = std::abs(measure(halfdisc, QuadratureSpec(0.1 / 25)) - half_area);
  for (int k = 1; k <= 4; ++k) {
    const double hs = 0.1 / std::pow(2.0, k);
    const double hd = 0.1 / (25 * std::pow(2.0, k));
    const double es = std::abs(integrate(f, box, QuadratureSpec(hs)) - smooth);
    const double ed = std::abs(measure(halfdisc, QuadratureSpec(hd)) - half_area);
    const double rs = prev_s / es, rd = prev_d / ed;
    ratios += fmt(" %.2f/%.2f", rs, rd);
    if (rs < 1.5) out.fail(fmt("smooth integrand ratio %.2f at h=%.4g", rs, hs));
    if (rd < 1.5) out.fail(fmt("half-disc ratio %.2f at h=%.4g", rd, hd));
    prev_s = es;
    prev_d = ed;
  }
  out.note(ratios + " (smooth/half-disc)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string workdir = (fs::temp_directory_path() / "nscond_acceptance").string();
  std::vector<std::string> only;
  unsigned workers = 0;
  app.add_option("--workdir", workdir, "Scratch directory");
  app.add_option("--only", only, "Run only the named criteria");
  app.add_option("--workers", workers, "Worker threads, 0 = available parallelism");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.workdir = workdir;
  ctx.workers = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  fs::create_directories(ctx.workdir);

  const std::vector<Criterion> criteria{
      {"normalization", normalization},
      {"campbell", campbell},
      {"oracle-agreement", oracle_agreement},
      {"matern-equivalence", matern_equivalence},
      {"table1-reduced", table1_reduced},
      {"self-consistency", self_consistency},
      {"determinism", determinism},
      {"geometry", geometry},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(ctx, out);
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.name.c_str(), secs);
    for (const auto& n : out.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
