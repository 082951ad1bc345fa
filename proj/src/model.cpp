#include "model.hpp"

#include <algorithm>
#include <limits>

namespace nscond {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probability(double a, const char* what) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

DispersalKernel DispersalKernel::uniform_disc(double range) {
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw InvalidArgument("kernel range must be positive and finite");
  }
  return DispersalKernel{range};
}

double DispersalKernel::mass(Point centre, const Region& region, const QuadratureSpec& q) const {
  const Disc d{centre, range};
  if (auto exact = disc_region_measure_exact(d, region)) return *exact * peak();
  return disc_region_measure(d, region, q) * peak();
}

ClusterModel ClusterModel::make(double kappa, double mu, double range) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be > 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be > 0");
  return ClusterModel{kappa, mu, DispersalKernel::uniform_disc(range)};
}

ThinningField ThinningField::constant(double alpha) {
  check_probability(alpha, "constant retention probability");
  return ThinningField(Constant{alpha});
}

ThinningField ThinningField::step(double alpha1, double alpha2, double v) {
  check_probability(alpha1, "alpha1");
  check_probability(alpha2, "alpha2");
  if (!std::isfinite(v)) throw InvalidArgument("step location v must be finite");
  return ThinningField(Step{alpha1, alpha2, v});
}

ThinningField ThinningField::linear(double intercept, double slope) {
  if (!std::isfinite(intercept) || !std::isfinite(slope)) {
    throw InvalidArgument("linear thinning coefficients must be finite");
  }
  return ThinningField(Linear{intercept, slope});
}

ThinningField ThinningField::grid(const Rect& extent, std::size_t nx, std::size_t ny,
                                  std::vector<double> values) {
  if (!extent.finite() || extent.width() <= 0.0 || extent.height() <= 0.0) {
    throw InvalidArgument("thinning grid extent must be a finite non-degenerate rectangle");
  }
  if (nx == 0 || ny == 0 || values.size() != nx * ny) {
    throw InvalidArgument("thinning grid needs nx*ny values");
  }
  for (double v : values) check_probability(v, "grid retention probability");
  Lattice lat;
  lat.extent = extent;
  lat.nx = nx;
  lat.ny = ny;
  lat.dx = extent.width() / static_cast<double>(nx);
  lat.dy = extent.height() / static_cast<double>(ny);
  return ThinningField(Grid{lat, std::move(values)});
}

double ThinningField::operator()(Point x) const {
  struct Eval {
    Point x;
    double operator()(const Constant& c) const { return c.alpha; }
    double operator()(const Step& s) const { return x.x <= s.v ? s.alpha1 : s.alpha2; }
    double operator()(const Linear& l) const {
      return std::clamp(l.intercept + l.slope * x.x, 0.0, 1.0);
    }
    double operator()(const Grid& g) const {
      const auto cell = g.lattice.locate(x);
      if (!cell) throw DomainError("thinning grid is undefined outside its extent");
      return g.values[g.lattice.index(cell->first, cell->second)];
    }
  };
  return std::visit(Eval{x}, v_);
}

double ThinningField::upper_bound() const {
  struct Bound {
    double operator()(const Constant& c) const { return c.alpha; }
    double operator()(const Step& s) const { return std::max(s.alpha1, s.alpha2); }
    double operator()(const Linear&) const { return 1.0; }
    double operator()(const Grid& g) const {
      return *std::max_element(g.values.begin(), g.values.end());
    }
  };
  return std::visit(Bound{}, v_);
}

std::string_view ThinningField::name() const {
  struct Name {
    std::string_view operator()(const Constant&) const { return "constant"; }
    std::string_view operator()(const Step&) const { return "step"; }
    std::string_view operator()(const Linear&) const { return "linear"; }
    std::string_view operator()(const Grid&) const { return "grid"; }
  };
  return std::visit(Name{}, v_);
}

std::vector<ThinningField::Piece> ThinningField::pieces_within(const Rect& box) const {
  std::vector<Piece> out;
  auto add = [&](const Rect& where, double a, double b) {
    if (a == 0.0 && b == 0.0) return;
    if (auto r = intersection(where, box)) out.push_back({*r, a, b});
  };
  struct Split {
    decltype(add)& emit;
    void operator()(const Constant& c) const { emit(Rect{-kInf, -kInf, kInf, kInf}, c.alpha, 0.0); }
    void operator()(const Step& s) const {
      emit(Rect{-kInf, -kInf, s.v, kInf}, s.alpha1, 0.0);
      emit(Rect{s.v, -kInf, kInf, kInf}, s.alpha2, 0.0);
    }
    void operator()(const Linear& l) const {
      if (l.slope == 0.0) {
        emit(Rect{-kInf, -kInf, kInf, kInf}, std::clamp(l.intercept, 0.0, 1.0), 0.0);
        return;
      }
      // value crosses 0 at x0 and 1 at x1
      const double x0 = -l.intercept / l.slope;
      const double x1 = (1.0 - l.intercept) / l.slope;
      const double lo = std::min(x0, x1);
      const double hi = std::max(x0, x1);
      emit(Rect{lo, -kInf, hi, kInf}, l.intercept, l.slope);
      // outside [lo, hi] the clamp saturates at 1 on the side of x1
      if (l.slope > 0.0) {
        emit(Rect{hi, -kInf, kInf, kInf}, 1.0, 0.0);
      } else {
        emit(Rect{-kInf, -kInf, lo, kInf}, 1.0, 0.0);
      }
    }
    void operator()(const Grid& g) const {
      const Lattice& lat = g.lattice;
      auto index_range = [](double lo, double hi, double origin, double step, std::size_t n) {
        const double a = std::floor((lo - origin) / step);
        const double b = std::ceil((hi - origin) / step);
        const auto first = static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n)));
        const auto last = static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(n)));
        return std::make_pair(first, last);
      };
      const Rect& box = box_;
      const auto [i0, i1] = index_range(box.xmin, box.xmax, lat.extent.xmin, lat.dx, lat.nx);
      const auto [j0, j1] = index_range(box.ymin, box.ymax, lat.extent.ymin, lat.dy, lat.ny);
      for (std::size_t j = j0; j < j1; ++j) {
        for (std::size_t i = i0; i < i1; ++i) {
          const double x0 = lat.extent.xmin + static_cast<double>(i) * lat.dx;
          const double y0 = lat.extent.ymin + static_cast<double>(j) * lat.dy;
          emit(Rect{x0, y0, x0 + lat.dx, y0 + lat.dy}, g.values[lat.index(i, j)], 0.0);
        }
      }
    }
    const Rect& box_;
  };
  std::visit(Split{add, box}, v_);
  return out;
}

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Parent:
      return "parent";
    case Role::Offspring:
      return "offspring";
    case Role::Thinned:
      return "thinned";
  }
  return "parent";
}

Role parse_role(std::string_view s) {
  if (s == "parent") return Role::Parent;
  if (s == "offspring") return Role::Offspring;
  if (s == "thinned") return Role::Thinned;
  throw InvalidArgument("unknown point role '" + std::string(s) + "'");
}

PointPattern PointPattern::restricted_to(const Region& region) const {
  PointPattern out{{}, region, role};
  for (const Point& p : points) {
    if (region.contains(p)) out.points.push_back(p);
  }
  return out;
}

ObservationScheme ObservationScheme::make(const Region& S, const Region& W, double r,
                                          double resolution) {
  if (!S.is_bounded() || !W.is_bounded()) throw InvalidArgument("S and W must be bounded");
  const Rect sb = S.bbox();
  const Rect wb = W.bbox();
  if (wb.xmin < sb.xmin || wb.ymin < sb.ymin || wb.xmax > sb.xmax || wb.ymax > sb.ymax) {
    throw InvalidArgument("observation window W must lie inside S");
  }
  ObservationScheme s{S, W, std::nullopt, r, W, W, S};
  s.W_dilated = dilate(W, r, resolution);
  s.border = subtract(s.W_dilated, W);
  s.S_dilated = dilate(S, r, resolution);
  if (auto parts = W.rect_with_hole()) s.hole = parts->second;
  return s;
}

ObservationScheme ObservationScheme::with_hole(const Rect& S, std::optional<Rect> hole, double r,
                                               double resolution) {
  const Region s = Region::rect(S);
  if (!hole) return make(s, s, r, resolution);
  if (hole->xmin < S.xmin || hole->ymin < S.ymin || hole->xmax > S.xmax || hole->ymax > S.ymax) {
    throw InvalidArgument("hole W_h must lie inside S");
  }
  return make(s, subtract(s, Region::rect(*hole)), r, resolution);
}

double intensity(const ClusterModel& model, const ThinningField& p, Point x) {
  return model.kappa * model.mu * p(x);
}

PointPattern sample_homogeneous_poisson(double rate, const Region& region, Rng& rng, Role role) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidArgument("Poisson rate must be >= 0");
  const Rect box = region.bbox();
  if (!box.finite()) throw InvalidArgument("cannot sample on an unbounded region");
  PointPattern out{{}, region, role};
  const double mean = rate * std::max(box.area(), 0.0);
  if (mean <= 0.0) return out;
  const auto n = std::poisson_distribution<long long>(mean)(rng);
  std::uniform_real_distribution<double> ux(box.xmin, box.xmax);
  std::uniform_real_distribution<double> uy(box.ymin, box.ymax);
  out.points.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const Point p{x, y};
    if (region.contains(p)) out.points.push_back(p);
  }
  return out;
}

PointPattern sample_homogeneous_poisson(double rate, const Region& region, Seed seed, Role role) {
  Rng rng = make_rng(seed);
  return sample_homogeneous_poisson(rate, region, rng, role);
}

ClusterRealization sample_thinned_cluster(const ClusterModel& model, const ThinningField& p,
                                          const ObservationScheme& scheme, Rng& rng) {
  ClusterRealization out{sample_homogeneous_poisson(model.kappa, scheme.S_dilated, rng, Role::Parent),
                         PointPattern{{}, scheme.S, Role::Offspring},
                         PointPattern{{}, scheme.S, Role::Thinned}};
  std::poisson_distribution<long long> count(model.mu);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double r = model.range();
  for (const Point& parent : out.parents.points) {
    const long long n = count(rng);
    for (long long k = 0; k < n; ++k) {
      const double rad = r * std::sqrt(u01(rng));
      const double theta = 2.0 * kPi * u01(rng);
      const Point child{parent.x + rad * std::cos(theta), parent.y + rad * std::sin(theta)};
      const double keep = u01(rng);  // drawn for every child so streams stay aligned
      if (!scheme.S.contains(child)) continue;
      out.offspring.points.push_back(child);
      if (keep < p(child)) out.thinned.points.push_back(child);
    }
  }
  return out;
}

ClusterRealization sample_thinned_cluster(const ClusterModel& model, const ThinningField& p,
                                          const ObservationScheme& scheme, Seed seed) {
  Rng rng = make_rng(seed);
  return sample_thinned_cluster(model, p, scheme, rng);
}

PointPattern sample_inhomogeneous_poisson(const IntensityFn& intensity_fn, double bound,
                                          const Region& region, Rng& rng, Role role) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw InvalidArgument("intensity bound must be finite and >= 0");
  }
  PointPattern candidates = sample_homogeneous_poisson(bound, region, rng, role);
  PointPattern out{{}, region, role};
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (const Point& c : candidates.points) {
    const double lam = intensity_fn(c);
    if (lam > bound) {
      throw InvalidArgument("intensity " + std::to_string(lam) + " exceeds the bound " +
                            std::to_string(bound));
    }
    if (u01(rng) * bound < lam) out.points.push_back(c);
  }
  return out;
}

PointPattern sample_inhomogeneous_poisson(const IntensityFn& intensity_fn, double bound,
                                          const Region& region, Seed seed, Role role) {
  Rng rng = make_rng(seed);
  return sample_inhomogeneous_poisson(intensity_fn, bound, region, rng, role);
}

}  // namespace nscond
