#include "stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace nscond {

DistanceGrid DistanceGrid::make(std::vector<double> d) {
  if (d.size() < 11) throw InvalidArgument("distance grid needs at least 11 points");
  if (d.front() != 0.0) throw InvalidArgument("distance grid must start at 0");
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (!(d[k] > d[k - 1]) || !std::isfinite(d[k])) {
      throw InvalidArgument("distance grid must be strictly increasing and finite");
    }
  }
  return DistanceGrid{std::move(d)};
}

DistanceGrid DistanceGrid::equispaced(double d_max, std::size_t count) {
  if (!(d_max > 0.0)) throw InvalidArgument("d_max must be positive");
  if (count < 11) throw InvalidArgument("distance grid needs at least 11 points");
  std::vector<double> d(count);
  for (std::size_t k = 0; k < count; ++k) {
    d[k] = d_max * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  d.back() = d_max;
  return make(std::move(d));
}

std::string_view kind_name(StatKind k) {
  switch (k) {
    case StatKind::H:
      return "H";
    case StatKind::E:
      return "E";
    case StatKind::Binner:
      return "Binner";
    case StatKind::Bouter:
      return "Bouter";
  }
  return "H";
}

std::string_view source_name(CurveSource s) {
  switch (s) {
    case CurveSource::Observed:
      return "empirical-observed";
    case CurveSource::Simulated:
      return "empirical-simulated";
    case CurveSource::Theoretical:
      return "theoretical";
  }
  return "empirical-observed";
}

namespace {

// Mass at distance t lands in the first grid slot with d_k >= t.
struct Histogram {
  const DistanceGrid& grid;
  std::vector<double> bins;
  double inv_step = 0.0;  // > 0 when the grid is equispaced

  explicit Histogram(const DistanceGrid& g) : grid(g), bins(g.size(), 0.0) {
    const double step = g.max() / static_cast<double>(g.size() - 1);
    bool even = true;
    for (std::size_t k = 0; k < g.size() && even; ++k) {
      even = std::abs(g.d[k] - step * static_cast<double>(k)) <= 1e-12 * g.max();
    }
    if (even) inv_step = 1.0 / step;
  }

  std::size_t slot(double t) const {
    const std::size_t n = grid.size();
    if (inv_step == 0.0) {
      return static_cast<std::size_t>(std::lower_bound(grid.d.begin(), grid.d.end(), t) -
                                      grid.d.begin());
    }
    auto k = static_cast<std::size_t>(std::min(std::ceil(t * inv_step), static_cast<double>(n)));
    while (k > 0 && grid.d[k - 1] >= t) --k;
    while (k < n && grid.d[k] < t) ++k;
    return k;
  }

  void add(double t, double w) {
    const std::size_t k = slot(t);
    if (k < bins.size()) bins[k] += w;
  }

  std::vector<double> cumulative(double scale) const {
    std::vector<double> out(bins.size());
    double run = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      run += bins[k];
      out[k] = run * scale;
    }
    return out;
  }
};

StatCurve curve(const DistanceGrid& grid, StatKind kind, CurveSource source,
                std::vector<double> values) {
  return StatCurve{grid, kind, source, std::move(values)};
}

// Visits raster cells whose centre is within `reach` of p.
template <class F>
void for_cells_near(const Raster& ras, Point p, double reach, F&& f) {
  const Lattice& lat = ras.lattice;
  auto range = [](double lo, double hi, double origin, double step, std::size_t n) {
    const double a = std::floor((lo - origin) / step - 0.5);
    const double b = std::ceil((hi - origin) / step - 0.5);
    return std::make_pair(
        static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n))),
        static_cast<std::size_t>(std::clamp(b + 1.0, 0.0, static_cast<double>(n))));
  };
  const auto [i0, i1] = range(p.x - reach, p.x + reach, lat.extent.xmin, lat.dx, lat.nx);
  const auto [j0, j1] = range(p.y - reach, p.y + reach, lat.extent.ymin, lat.dy, lat.ny);
  const double reach2 = reach * reach;
  for (std::size_t j = j0; j < j1; ++j) {
    const double cy = lat.extent.ymin + (static_cast<double>(j) + 0.5) * lat.dy;
    for (std::size_t i = i0; i < i1; ++i) {
      const double v = ras.values[lat.index(i, j)];
      if (v == 0.0) continue;
      const double cx = lat.extent.xmin + (static_cast<double>(i) + 0.5) * lat.dx;
      const double t2 = (cx - p.x) * (cx - p.x) + (cy - p.y) * (cy - p.y);
      if (t2 <= reach2) f(std::sqrt(t2), v);
    }
  }
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

StatCurve stat_H_emp(const PointPattern& parents, const DistanceGrid& grid) {
  if (parents.empty()) throw InvalidArgument("H statistic needs at least one parent point");
  Histogram hist(grid);
  const auto& pts = parents.points;
  const double dmax = grid.max();
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double t = distance(pts[a], pts[b]);
      if (t <= dmax) hist.add(t, 2.0);
    }
  }
  return curve(grid, StatKind::H, CurveSource::Observed,
               hist.cumulative(1.0 / static_cast<double>(pts.size())));
}

StatCurve stat_E_emp(const PointPattern& offspring, const PointPattern& parents,
                     const DistanceGrid& grid) {
  if (offspring.empty()) throw InvalidArgument("E statistic needs at least one offspring point");
  Histogram hist(grid);
  const double dmax = grid.max();
  for (const Point& x : offspring.points) {
    for (const Point& y : parents.points) {
      const double t = distance(x, y);
      if (t <= dmax) hist.add(t, 1.0);
    }
  }
  return curve(grid, StatKind::E, CurveSource::Observed,
               hist.cumulative(1.0 / static_cast<double>(offspring.size())));
}

StatCurve stat_B_emp(const PointPattern& parents, const Polyline& b_W, const DistanceGrid& grid,
                     StatKind kind) {
  const double total = b_W.length();
  std::vector<double> values(grid.size(), 0.0);
  for (const Point& y : parents.points) {
    for (std::size_t k = 1; k < grid.size(); ++k) {
      values[k] += arc_length_in_disc(b_W, Disc{y, grid.d[k]});
    }
  }
  for (double& v : values) v /= total;
  return curve(grid, kind, CurveSource::Observed, std::move(values));
}

Raster stat_raster(const CondParentField& rho, const Region& S, const QuadratureSpec& q) {
  const Lattice lat = Lattice::cover(S.bbox(), q.h);
  const Lattice& fine = rho.lattice();
  const auto sub = [](double coarse, double f) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(coarse / f - 1e-9)));
  };
  const std::size_t kx = sub(lat.dx, fine.dx);
  const std::size_t ky = sub(lat.dy, fine.dy);
  Raster out(lat, 0.0);
  for (std::size_t j = 0; j < lat.ny; ++j) {
    for (std::size_t i = 0; i < lat.nx; ++i) {
      if (!S.contains(lat.center(i, j))) continue;
      const double x0 = lat.extent.xmin + static_cast<double>(i) * lat.dx;
      const double y0 = lat.extent.ymin + static_cast<double>(j) * lat.dy;
      double sum = 0.0;
      for (std::size_t b = 0; b < ky; ++b) {
        for (std::size_t a = 0; a < kx; ++a) {
          sum += rho.at(Point{x0 + (static_cast<double>(a) + 0.5) * lat.dx / kx,
                              y0 + (static_cast<double>(b) + 0.5) * lat.dy / ky});
        }
      }
      out.at(i, j) = sum / static_cast<double>(kx * ky);
    }
  }
  return out;
}

StatCurve stat_H_theo(const Raster& rho_S, const DistanceGrid& grid) {
  const Lattice& lat = rho_S.lattice;
  const double cell = lat.cell_area();
  double mass = 0.0;
  for (double v : rho_S.values) mass += v;
  mass *= cell;
  if (!(mass > 0.0)) throw DomainError("H trend undefined: rho integrates to 0 over S");

  const auto lag_x = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(lat.nx - 1), std::ceil(grid.max() / lat.dx)));
  const auto lag_y = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(lat.ny - 1), std::ceil(grid.max() / lat.dy)));
  const std::size_t px = lat.nx + lag_x;
  const std::size_t py = lat.ny + lag_y;
  const std::size_t pxc = px / 2 + 1;

  double* buf = fftw_alloc_real(py * px);
  fftw_complex* spec = fftw_alloc_complex(py * pxc);
  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_2d(static_cast<int>(py), static_cast<int>(px), buf, spec,
                               FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_2d(static_cast<int>(py), static_cast<int>(px), spec, buf,
                               FFTW_ESTIMATE);
  }
  std::fill(buf, buf + py * px, 0.0);
  for (std::size_t j = 0; j < lat.ny; ++j) {
    for (std::size_t i = 0; i < lat.nx; ++i) buf[j * px + i] = rho_S.at(i, j);
  }
  fftw_execute(fwd);
  for (std::size_t c = 0; c < py * pxc; ++c) {
    spec[c][0] = spec[c][0] * spec[c][0] + spec[c][1] * spec[c][1];
    spec[c][1] = 0.0;
  }
  fftw_execute(inv);

  // buf now holds (px*py) * sum_z rho(z) rho(z + lag)
  const double norm = cell * cell / static_cast<double>(px * py);
  Histogram hist(grid);
  const double self = std::sqrt(cell / kPi);
  const auto lx = static_cast<long>(lag_x);
  const auto ly = static_cast<long>(lag_y);
  for (long dy = -ly; dy <= ly; ++dy) {
    const std::size_t row = static_cast<std::size_t>((dy + static_cast<long>(py)) %
                                                     static_cast<long>(py));
    for (long dx = -lx; dx <= lx; ++dx) {
      const std::size_t col = static_cast<std::size_t>((dx + static_cast<long>(px)) %
                                                       static_cast<long>(px));
      double t = std::hypot(static_cast<double>(dx) * lat.dx, static_cast<double>(dy) * lat.dy);
      if (t == 0.0) t = self;
      if (t > grid.max()) continue;
      hist.add(t, std::max(0.0, buf[row * px + col]) * norm);
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  fftw_free(spec);
  return curve(grid, StatKind::H, CurveSource::Theoretical, hist.cumulative(1.0 / mass));
}

StatCurve stat_E_theo(const PointPattern& offspring, const Raster& rho_S,
                      const DistanceGrid& grid) {
  if (offspring.empty()) throw InvalidArgument("E trend needs at least one offspring point");
  const double cell = rho_S.lattice.cell_area();
  Histogram hist(grid);
  for (const Point& x : offspring.points) {
    for_cells_near(rho_S, x, grid.max(), [&](double t, double v) { hist.add(t, v * cell); });
  }
  return curve(grid, StatKind::E, CurveSource::Theoretical,
               hist.cumulative(1.0 / static_cast<double>(offspring.size())));
}

StatCurve stat_B_theo(const Raster& rho_S, const Polyline& b_W, const DistanceGrid& grid,
                      double step, StatKind kind) {
  if (!(step > 0.0)) throw InvalidArgument("boundary step must be positive");
  const double cell = rho_S.lattice.cell_area();
  Histogram hist(grid);
  for (const Segment& s : b_W.segments()) {
    const double len = s.length();
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step)));
    const double w = len / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double f = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
      const Point l{s.a.x + f * (s.b.x - s.a.x), s.a.y + f * (s.b.y - s.a.y)};
      for_cells_near(rho_S, l, grid.max(),
                     [&](double t, double v) { hist.add(t, w * v * cell); });
    }
  }
  return curve(grid, kind, CurveSource::Theoretical, hist.cumulative(1.0 / b_W.length()));
}

StatCurve stat_H_theo(const CondParentField& rho, const Region& S, const DistanceGrid& grid,
                      const QuadratureSpec& q) {
  return stat_H_theo(stat_raster(rho, S, q), grid);
}

StatCurve stat_E_theo(const PointPattern& offspring, const CondParentField& rho, const Region& S,
                      const DistanceGrid& grid, const QuadratureSpec& q) {
  return stat_E_theo(offspring, stat_raster(rho, S, q), grid);
}

StatCurve stat_B_theo(const CondParentField& rho, const Polyline& b_W, const Region& S,
                      const DistanceGrid& grid, const QuadratureSpec& q, StatKind kind) {
  return stat_B_theo(stat_raster(rho, S, q), b_W, grid, q.h, kind);
}

}  // namespace nscond
