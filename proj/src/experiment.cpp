#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace nscond {

std::vector<ExperimentCell> paper_table1_cells(double kappa, double mu) {
  const Rect S{0.0, 0.0, 1.0, 1.0};
  std::vector<ExperimentCell> cells;
  for (int which = 1; which <= 2; ++which) {
    for (double r : {0.05, 0.09, 0.13}) {
      std::ostringstream label;
      label << "p" << which << "_r" << r;
      if (which == 1) {
        cells.push_back({label.str(), ClusterModel::make(kappa, mu, r),
                         ThinningField::step(0.8, 0.2, 0.5), S, Rect{0.35, 0.35, 0.65, 0.65}});
      } else {
        cells.push_back({label.str(), ClusterModel::make(kappa, mu, r),
                         ThinningField::linear(1.0, -1.0), S, Rect{0.05, 0.36, 0.95, 0.64}});
      }
    }
  }
  return cells;
}

std::size_t kind_index(StatKind k) {
  switch (k) {
    case StatKind::H:
      return 0;
    case StatKind::E:
      return 1;
    case StatKind::Binner:
      return 2;
    case StatKind::Bouter:
      return 3;
  }
  return 0;
}

namespace {

// Lattice over S whose cells split the stat raster's cells exactly.
Lattice field_lattice(const Rect& S, double stat_h, double quad_h) {
  const Lattice coarse = Lattice::cover(S, stat_h);
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::max(coarse.dx, coarse.dy) / quad_h - 1e-9)));
  Lattice fine = coarse;
  fine.nx *= k;
  fine.ny *= k;
  fine.dx = S.width() / static_cast<double>(fine.nx);
  fine.dy = S.height() / static_cast<double>(fine.ny);
  return fine;
}

struct CellContext {
  const ExperimentCell& cell;
  const ExperimentSettings& settings;
  ObservationScheme scheme;
  ExposureMap exposure;
  Region S;
  Polyline inner;
  Polyline outer;
  QuadratureSpec stat_q;
};

void add_curves(PerKind& slot, const PointPattern& parents, const PointPattern& phi_W,
                const CellContext& ctx) {
  const DistanceGrid& g = ctx.settings.grid;
  slot[0] = stat_H_emp(parents, g).values;
  slot[1] = stat_E_emp(phi_W, parents, g).values;
  slot[2] = stat_B_emp(parents, ctx.inner, g, StatKind::Binner).values;
  slot[3] = stat_B_emp(parents, ctx.outer, g, StatKind::Bouter).values;
}

ReplicateCurves run_replicate(const CellContext& ctx, Seed seed, std::size_t cell_index,
                              std::size_t rep) {
  const ExperimentCell& cell = ctx.cell;
  const ExperimentSettings& st = ctx.settings;
  const DistanceGrid& g = st.grid;
  Rng rng = make_rng(seed, cell_index, rep);

  const ClusterRealization truth = sample_thinned_cluster(cell.model, cell.p, ctx.scheme, rng);
  const PointPattern phi_W = truth.thinned.restricted_to(ctx.scheme.W);
  PointPattern psi_S = truth.parents.restricted_to(ctx.S);

  const CondParentField rho = build_rho_field(ctx.exposure, phi_W, cell.model);
  const IntensityFn rho_fn = [&rho](Point y) { return rho.at(y); };
  if (st.self_consistency) {
    psi_S = sample_inhomogeneous_poisson(rho_fn, rho.bound, ctx.S, rng);
  }

  ReplicateCurves out;
  out.replicate = rep;
  out.parents_in_S = psi_S.size();
  out.observed_offspring = phi_W.size();
  add_curves(out.observed, psi_S, phi_W, ctx);

  for (auto& v : out.simulated) v.reserve(st.n_sim);
  PerKind sim;
  for (std::size_t s = 0; s < st.n_sim; ++s) {
    const PointPattern draw = sample_inhomogeneous_poisson(rho_fn, rho.bound, ctx.S, rng);
    add_curves(sim, draw, phi_W, ctx);
    for (std::size_t k = 0; k < kKindCount; ++k) out.simulated[k].push_back(std::move(sim[k]));
  }
  for (std::size_t k = 0; k < kKindCount; ++k) {
    std::vector<double> mean(g.size(), 0.0);
    for (const auto& c : out.simulated[k]) {
      for (std::size_t i = 0; i < g.size(); ++i) mean[i] += c[i];
    }
    for (double& v : mean) v /= static_cast<double>(st.n_sim);
    out.simulated_mean[k] = std::move(mean);
  }

  const Raster rho_S = stat_raster(rho, ctx.S, ctx.stat_q);
  out.theoretical[0] = stat_H_theo(rho_S, g).values;
  out.theoretical[1] = stat_E_theo(phi_W, rho_S, g).values;
  out.theoretical[2] = stat_B_theo(rho_S, ctx.inner, g, st.stat_h, StatKind::Binner).values;
  out.theoretical[3] = stat_B_theo(rho_S, ctx.outer, g, st.stat_h, StatKind::Bouter).values;
  return out;
}

EnvelopeSet envelope_of(const std::vector<const std::vector<double>*>& rows,
                        const DistanceGrid& grid, StatKind kind, CurveSource source,
                        double level) {
  std::vector<StatCurve> curves;
  curves.reserve(rows.size());
  for (const auto* r : rows) curves.push_back(StatCurve{grid, kind, source, *r});
  return envelopes(curves, level);
}

}  // namespace

CellResult run_experiment(const ExperimentCell& cell, const ExperimentSettings& settings,
                          Seed seed, std::size_t cell_index, unsigned workers) {
  if (settings.N < 2) throw InvalidArgument("experiment needs N >= 2 replicates");
  if (settings.n_sim < 1) throw InvalidArgument("experiment needs n_sim >= 1");
  const double r = cell.model.range();
  const double quad_h = settings.quad_h.value_or(r / 50.0);
  const QuadratureSpec q(quad_h);
  const QuadratureSpec stat_q(settings.stat_h);

  const ObservationScheme scheme = ObservationScheme::with_hole(cell.S, cell.W_h, r, quad_h);
  const Lattice lattice = field_lattice(cell.S, settings.stat_h, quad_h);
  CellContext ctx{cell,
                  settings,
                  scheme,
                  ExposureMap::build(cell.model, cell.p, scheme.W, lattice, q),
                  Region::rect(cell.S),
                  Polyline::of_rect(cell.W_h),
                  Polyline::of_rect(cell.S),
                  stat_q};

  const std::size_t N = settings.N;
  std::vector<std::optional<ReplicateCurves>> slots(N);
  std::vector<std::string> errors(N);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t rep = next++; rep < N; rep = next++) {
      try {
        slots[rep] = run_replicate(ctx, seed, cell_index, rep);
      } catch (const std::exception& e) {
        errors[rep] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(N)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  CellResult result{cell.label, settings.grid, {}, {}, std::nullopt};
  for (std::size_t rep = 0; rep < N; ++rep) {
    if (slots[rep]) {
      result.replicates.push_back(std::move(*slots[rep]));
    } else {
      result.failures.push_back({rep, errors[rep]});
    }
  }
  if (!result.failures.empty() &&
      static_cast<double>(result.failures.size()) >= 0.05 * static_cast<double>(N)) {
    std::string msg = "cell " + cell.label + ": " + std::to_string(result.failures.size()) +
                      " of " + std::to_string(N) + " replicates failed; first: replicate " +
                      std::to_string(result.failures.front().replicate) + ": " +
                      result.failures.front().message;
    throw Error(msg);
  }

  if (result.replicates.size() < kMinEnvelopeCurves) return result;

  std::array<KindSummary, kKindCount> summary;
  for (StatKind kind : kAllKinds) {
    const std::size_t k = kind_index(kind);
    std::vector<const std::vector<double>*> obs;
    std::vector<const std::vector<double>*> theo;
    std::vector<const std::vector<double>*> sim;
    for (const auto& rc : result.replicates) {
      obs.push_back(&rc.observed[k]);
      theo.push_back(&rc.theoretical[k]);
      for (const auto& s : rc.simulated[k]) sim.push_back(&s);
    }
    KindSummary& ks = summary[k];
    ks.kind = kind;
    ks.observed =
        envelope_of(obs, settings.grid, kind, CurveSource::Observed, settings.level);
    ks.simulated =
        envelope_of(sim, settings.grid, kind, CurveSource::Simulated, settings.level);
    ks.theoretical =
        envelope_of(theo, settings.grid, kind, CurveSource::Theoretical, settings.level);
    ks.coverage = coverage_tau(ks.observed, ks.simulated);
  }
  result.summary = std::move(summary);
  return result;
}

}  // namespace nscond
