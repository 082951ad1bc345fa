#include "condint.hpp"

#include <algorithm>
#include <cmath>

#include "exposure_eval.hpp"

namespace nscond {

double kernel_density(const ClusterModel& model, Point u) {
  return model.kernel.density(u.x, u.y);
}

ExposureEvaluator::ExposureEvaluator(const ClusterModel& model, const ThinningField& p,
                                     const Region& W, const QuadratureSpec& q)
    : model_(model), p_(p), W_(W), q_(q), rects_(W.signed_rects()) {}

double ExposureEvaluator::exact(Point y) const {
  const double r = model_.range();
  const Disc d{y, r};
  const Rect box = d.bbox();
  double total = 0.0;
  for (const SignedRect& s : *rects_) {
    const auto clip = intersection(s.rect, box);
    if (!clip) continue;
    for (const auto& piece : p_.pieces_within(*clip)) {
      const AreaMoments m = disc_rect_moments(d, piece.where);
      total += s.sign * (piece.a * m.area + piece.b * m.mx);
    }
  }
  return std::clamp(total * model_.kernel.peak(), 0.0, 1.0);
}

double ExposureEvaluator::quadrature(Point y) const {
  const Region region = intersect(Region::disc(Disc{y, model_.range()}), W_);
  const double peak = model_.kernel.peak();
  return integrate([&](Point z) { return p_(z) * peak; }, region, q_);
}

double ExposureEvaluator::operator()(Point y) const {
  return rects_ ? exact(y) : quadrature(y);
}

std::optional<double> exposure_exact(Point y, const ClusterModel& model, const ThinningField& p,
                                     const Region& W) {
  const ExposureEvaluator eval(model, p, W, QuadratureSpec(model.range()));
  if (!eval.has_exact()) return std::nullopt;
  return eval.exact(y);
}

double exposure_quadrature(Point y, const ClusterModel& model, const ThinningField& p,
                           const Region& W, const QuadratureSpec& q) {
  return ExposureEvaluator(model, p, W, q).quadrature(y);
}

double exposure(Point y, const ClusterModel& model, const ThinningField& p, const Region& W,
                const QuadratureSpec& q) {
  return ExposureEvaluator(model, p, W, q)(y);
}

double observed_weight(double exposure_value, double mu) {
  const double x = mu * exposure_value;
  if (x < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

double normalizer_c(Point y, const ClusterModel& model, const ThinningField& p, const Region& W,
                    const QuadratureSpec& q) {
  const double J = exposure(y, model, p, W, q);
  return p(y) * model.mu * observed_weight(J, model.mu);
}

double rho_approx(Point y, const PointPattern& obs, const ClusterModel& model,
                  const ThinningField& p, const ObservationScheme& scheme,
                  const QuadratureSpec& q) {
  const double J = exposure(y, model, p, scheme.W, q);
  double ksum = 0.0;
  for (const Point& x : obs.points) ksum += kernel_density(model, Point{x.x - y.x, x.y - y.y});
  return observed_weight(J, model.mu) * ksum + model.kappa * std::exp(-model.mu * J);
}

ExposureMap ExposureMap::build(const ClusterModel& model, const ThinningField& p, const Region& W,
                               const Lattice& lattice, const QuadratureSpec& q) {
  const ExposureEvaluator eval(model, p, W, q);
  ExposureMap map{lattice, {}, {}, {}};
  map.exposure.resize(lattice.size());
  map.weight.resize(lattice.size());
  map.barren.resize(lattice.size());
  for (std::size_t j = 0; j < lattice.ny; ++j) {
    for (std::size_t i = 0; i < lattice.nx; ++i) {
      const std::size_t c = lattice.index(i, j);
      const double J = eval(lattice.center(i, j));
      map.exposure[c] = J;
      map.weight[c] = observed_weight(J, model.mu);
      map.barren[c] = model.kappa * std::exp(-model.mu * J);
    }
  }
  return map;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Approx:
      return "approx";
    case Provenance::Baudin:
      return "baudin";
    case Provenance::Oracle:
      return "oracle";
    case Provenance::Constant:
      return "constant";
  }
  return "approx";
}

double field_bound(const Raster& values) { return 1.05 * values.max_value(); }

CondParentField build_rho_field(const ExposureMap& map, const PointPattern& obs,
                                const ClusterModel& model) {
  const Lattice& lat = map.lattice;
  Raster ksum(lat, 0.0);
  const double r = model.range();
  const double r2 = r * r;
  const double peak = model.kernel.peak();
  auto span_of = [](double lo, double hi, double origin, double step, std::size_t n) {
    // cells whose centre may lie in [lo, hi]
    const double a = std::floor((lo - origin) / step - 0.5);
    const double b = std::ceil((hi - origin) / step - 0.5);
    const auto first = static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n)));
    const auto last = static_cast<std::size_t>(std::clamp(b + 1.0, 0.0, static_cast<double>(n)));
    return std::make_pair(first, last);
  };
  for (const Point& x : obs.points) {
    const auto [i0, i1] = span_of(x.x - r, x.x + r, lat.extent.xmin, lat.dx, lat.nx);
    const auto [j0, j1] = span_of(x.y - r, x.y + r, lat.extent.ymin, lat.dy, lat.ny);
    for (std::size_t j = j0; j < j1; ++j) {
      const double cy = lat.extent.ymin + (static_cast<double>(j) + 0.5) * lat.dy;
      const double ddy = (cy - x.y) * (cy - x.y);
      if (ddy > r2) continue;
      double* row = &ksum.values[lat.index(0, j)];
      for (std::size_t i = i0; i < i1; ++i) {
        const double cx = lat.extent.xmin + (static_cast<double>(i) + 0.5) * lat.dx;
        if ((cx - x.x) * (cx - x.x) + ddy <= r2) row[i] += peak;
      }
    }
  }
  CondParentField field{Raster(lat, 0.0), 0.0, Provenance::Approx};
  for (std::size_t c = 0; c < lat.size(); ++c) {
    field.values.values[c] = map.weight[c] * ksum.values[c] + map.barren[c];
  }
  field.bound = field_bound(field.values);
  return field;
}

CondParentField constant_rho_field(const Lattice& lattice, double value) {
  if (!(value >= 0.0)) throw InvalidArgument("parent intensity must be >= 0");
  CondParentField field{Raster(lattice, value), 0.0, Provenance::Constant};
  field.bound = field_bound(field.values);
  return field;
}

double lambda_cond(Point x_o, const CondParentField& rho, const ClusterModel& model,
                   const ThinningField& p, const ObservationScheme& scheme,
                   const QuadratureSpec& q) {
  const double px = p(x_o);
  if (px == 0.0) return 0.0;
  const Region near = intersect(Region::disc(Disc{x_o, model.range()}), scheme.W_dilated);
  auto k = [&](Point y) { return kernel_density(model, Point{y.x - x_o.x, y.y - x_o.y}); };
  const double conditioned = integrate([&](Point y) { return k(y) * rho.at(y); }, near, q);
  const double mass_near = integrate(k, near, q);
  const double unconditioned = std::max(0.0, 1.0 - mass_near);
  return model.mu * px * conditioned + model.mu * model.kappa * px * unconditioned;
}

double lambda_cond_matern(Point x_o, const CondParentField& rho, const ClusterModel& model,
                          const ThinningField& p, const ObservationScheme& scheme,
                          const QuadratureSpec& q) {
  const double px = p(x_o);
  if (px == 0.0) return 0.0;
  const Disc b{x_o, model.range()};
  const Region near = intersect(Region::disc(b), scheme.W_dilated);
  const double disc_area = b.area();
  const double rho_mass = integrate([&](Point y) { return rho.at(y); }, near, q);
  const double outside = disc_area - disc_region_measure(b, scheme.W_dilated, q);
  return model.mu * px / disc_area * rho_mass +
         model.kappa * model.mu * px * std::max(outside, 0.0) / disc_area;
}

CondIntensityField lambda_field(const Lattice& lattice, const Region& prediction,
                                const CondParentField& rho, const ClusterModel& model,
                                const ThinningField& p, const ObservationScheme& scheme,
                                const QuadratureSpec& q) {
  CondIntensityField out{Raster(lattice, std::nan(""))};
  for (std::size_t j = 0; j < lattice.ny; ++j) {
    for (std::size_t i = 0; i < lattice.nx; ++i) {
      const Point c = lattice.center(i, j);
      if (!prediction.contains(c)) continue;
      out.values.at(i, j) = lambda_cond(c, rho, model, p, scheme, q);
    }
  }
  return out;
}

}  // namespace nscond
