#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "condint.hpp"
#include "exposure_eval.hpp"

namespace nscond {

std::uint64_t bell_number(unsigned n) {
  // Bell triangle
  std::vector<std::uint64_t> row{1};
  for (unsigned i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

namespace {

Region disc_intersection(const std::vector<Point>& pts, std::uint32_t mask, double r) {
  std::optional<Region> acc;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(mask & (1u << i))) continue;
    const Region d = Region::disc(Disc{pts[i], r});
    acc = acc ? intersect(*acc, d) : d;
  }
  return *acc;
}

}  // namespace

BaudinPosterior::BaudinPosterior(const PointPattern& obs, const ClusterModel& model,
                                 const ThinningField& p, const Region& W, const QuadratureSpec& q)
    : obs_(obs.points), model_(model), p_(p), W_(W), q_(q) {
  const std::size_t n = obs_.size();
  if (n > kMaxExactObservations) {
    throw InvalidArgument("exact posterior enumeration supports at most " +
                          std::to_string(kMaxExactObservations) + " observed points, got " +
                          std::to_string(n));
  }
  const ExposureEvaluator J(model, p, W, q);
  const std::uint32_t subsets = 1u << n;
  mass_.assign(subsets, 0.0);
  block_weight_.assign(subsets, 0.0);

  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    const Region common = disc_intersection(obs_, mask, model.range());
    const int m = std::popcount(mask);
    mass_[mask] = model.kappa * integrate(
                                    [&](Point z) {
                                      double kprod = 1.0;
                                      for (std::size_t i = 0; i < n; ++i) {
                                        if (mask & (1u << i)) {
                                          kprod *= kernel_density(
                                              model, Point{obs_[i].x - z.x, obs_[i].y - z.y});
                                        }
                                      }
                                      return model.pgf_derivative(m, 1.0 - J(z)) * kprod;
                                    },
                                    common, q);
  }

  // Posterior over partitions: P(b) proportional to the product of S over its
  // blocks. Work in logs; partitions with an empty-mass block get weight 0.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> logw;
  logw.reserve(bell_number(static_cast<unsigned>(n)));
  double best = neg_inf;
  for_each_set_partition(static_cast<unsigned>(n), [&](std::span<const std::uint32_t> blocks) {
    double lw = 0.0;
    for (std::uint32_t b : blocks) {
      if (!(mass_[b] > 0.0)) {
        lw = neg_inf;
        break;
      }
      lw += std::log(mass_[b]);
    }
    logw.push_back(lw);
    best = std::max(best, lw);
  });
  if (best == neg_inf) {
    throw DomainError("observed points admit no cluster configuration under the model");
  }
  double total = 0.0;
  for (double lw : logw) total += std::exp(lw - best);
  partition_prob_.resize(logw.size());
  std::size_t idx = 0;
  for_each_set_partition(static_cast<unsigned>(n), [&](std::span<const std::uint32_t> blocks) {
    const double prob = std::exp(logw[idx] - best) / total;
    partition_prob_[idx++] = prob;
    for (std::uint32_t b : blocks) block_weight_[b] += prob;
  });
}

double BaudinPosterior::operator()(Point y) const {
  const ExposureEvaluator J(model_, p_, W_, q_);
  const double z = 1.0 - J(y);
  double rho = model_.kappa * model_.pgf(z);
  for (std::uint32_t mask = 1; mask < mass_.size(); ++mask) {
    if (!(block_weight_[mask] > 0.0) || !(mass_[mask] > 0.0)) continue;
    double kprod = 1.0;
    for (std::size_t i = 0; i < obs_.size() && kprod > 0.0; ++i) {
      if (mask & (1u << i)) {
        kprod *= kernel_density(model_, Point{obs_[i].x - y.x, obs_[i].y - y.y});
      }
    }
    if (kprod == 0.0) continue;
    const double numer = model_.kappa * model_.pgf_derivative(std::popcount(mask), z) * kprod;
    rho += block_weight_[mask] * numer / mass_[mask];
  }
  return rho;
}

double baudin_exact(Point y, const PointPattern& obs, const ClusterModel& model,
                    const ThinningField& p, const Region& W, const QuadratureSpec& q) {
  return BaudinPosterior(obs, model, p, W, q)(y);
}

}  // namespace nscond
