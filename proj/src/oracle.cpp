// Monte Carlo reference for rho(y | Phi_W).
//
// Given Phi_W the parents form a Cox-type posterior whose density with respect
// to the thinned prior Poisson(kappa exp(-mu J)) is proportional to
// prod_i K_i, K_i = sum_psi k(x_i - psi). Mecke's formula then gives
//   rho(y) = kappa exp(-mu J(y)) E[prod_i (K_i + k(x_i - y))] / E[prod_i K_i]
// with both expectations under the thinned prior, which is what we sample.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "condint.hpp"
#include "exposure_eval.hpp"

namespace nscond {

namespace {

// Log-scaled running sums for one y, rescaled whenever the shift grows.
struct RatioAccumulator {
  double shift = -std::numeric_limits<double>::infinity();
  double sa = 0.0, sb = 0.0, saa = 0.0, sab = 0.0, sbb = 0.0;

  void add(double log_a, double log_b) {
    if (log_a == -std::numeric_limits<double>::infinity()) return;
    if (log_a > shift) {
      const double f = shift == -std::numeric_limits<double>::infinity()
                           ? 0.0
                           : std::exp(shift - log_a);
      sa *= f;
      sb *= f;
      saa *= f * f;
      sab *= f * f;
      sbb *= f * f;
      shift = log_a;
    }
    const double a = std::exp(log_a - shift);
    const double b = std::exp(log_b - shift);
    sa += a;
    sb += b;
    saa += a * a;
    sab += a * b;
    sbb += b * b;
  }
};

}  // namespace

std::vector<OracleEstimate> importance_oracle(std::span<const Point> y_grid,
                                              const PointPattern& obs, const ClusterModel& model,
                                              const ThinningField& p,
                                              const ObservationScheme& scheme, std::size_t M,
                                              Seed seed, OracleDiagnostics* diagnostics) {
  if (M < 1000) throw InvalidArgument("oracle needs at least 1000 prior samples");
  const double r = model.range();
  const ExposureEvaluator J(model, p, scheme.W, QuadratureSpec(r / 50.0));

  // Parents farther than r from W and from every observation are independent
  // of Phi_W and cancel from the ratio.
  Rect box = scheme.W.bbox();
  for (const Point& x : obs.points) box = bounding_union(box, Rect{x.x, x.y, x.x, x.y});
  for (const Point& y : y_grid) box = bounding_union(box, Rect{y.x, y.y, y.x, y.y});
  box = box.expanded(r);
  if (!box.finite()) throw InvalidArgument("oracle needs a bounded observation window");

  const std::size_t n = obs.size();
  const std::size_t ny = y_grid.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  // k(x_i - y) does not change between samples.
  std::vector<double> ky(n * ny);
  for (std::size_t g = 0; g < ny; ++g) {
    for (std::size_t i = 0; i < n; ++i) {
      ky[g * n + i] = kernel_density(model, Point{obs.points[i].x - y_grid[g].x,
                                                  obs.points[i].y - y_grid[g].y});
    }
  }

  std::vector<RatioAccumulator> acc(ny);
  std::vector<double> K(n);
  std::vector<std::size_t> never_covered(n, 0);
  std::size_t nonzero = 0;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  std::vector<double> log_b_store;
  log_b_store.reserve(M);
  std::vector<Point> parents;

  for (std::size_t m = 0; m < M; ++m) {
    Rng rng = make_rng(seed, m);
    std::poisson_distribution<long> count(model.kappa * box.area());
    std::uniform_real_distribution<double> ux(box.xmin, box.xmax);
    std::uniform_real_distribution<double> uy(box.ymin, box.ymax);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    parents.clear();
    const long c = count(rng);
    for (long t = 0; t < c; ++t) {
      const Point psi{ux(rng), uy(rng)};
      const double keep = u01(rng);
      if (keep < std::exp(-model.mu * J(psi))) parents.push_back(psi);
    }
    double log_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const Point& psi : parents) {
        s += kernel_density(model, Point{obs.points[i].x - psi.x, obs.points[i].y - psi.y});
      }
      K[i] = s;
      if (s == 0.0) {
        ++never_covered[i];
        log_b = neg_inf;
      } else if (log_b != neg_inf) {
        log_b += std::log(s);
      }
    }
    log_b_store.push_back(log_b);
    if (log_b != neg_inf) ++nonzero;
    for (std::size_t g = 0; g < ny; ++g) {
      double log_a = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = K[i] + ky[g * n + i];
        if (v == 0.0) {
          log_a = neg_inf;
          break;
        }
        log_a += std::log(v);
      }
      acc[g].add(log_a, log_b);
    }
  }

  if (nonzero == 0) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (never_covered[i] > never_covered[worst]) worst = i;
    }
    const Point& x = obs.points[worst];
    throw Error("oracle: all importance weights are zero; observed point " +
                std::to_string(worst) + " at (" + std::to_string(x.x) + ", " +
                std::to_string(x.y) + ") had no prior parent within range in any of " +
                std::to_string(M) + " samples");
  }

  const double max_log_b = *std::max_element(log_b_store.begin(), log_b_store.end());
  for (double lb : log_b_store) {
    if (lb == neg_inf) continue;
    const double w = std::exp(lb - max_log_b);
    sum_w += w;
    sum_w2 += w * w;
  }

  std::vector<OracleEstimate> out(ny);
  for (std::size_t g = 0; g < ny; ++g) {
    const RatioAccumulator& a = acc[g];
    const double prior = model.kappa * std::exp(-model.mu * J(y_grid[g]));
    if (!(a.sb > 0.0)) {
      throw Error("oracle: importance weights underflow at grid point " + std::to_string(g));
    }
    const double ratio = a.sa / a.sb;
    const double var = std::max(0.0, a.saa - 2.0 * ratio * a.sab + ratio * ratio * a.sbb);
    out[g].value = prior * ratio;
    out[g].std_error = prior * std::sqrt(var) / a.sb;
  }
  if (diagnostics) {
    diagnostics->samples = M;
    diagnostics->nonzero_weights = nonzero;
    diagnostics->effective_sample_size = sum_w * sum_w / sum_w2;
  }
  return out;
}

}  // namespace nscond
