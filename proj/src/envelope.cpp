#include "envelope.hpp"

#include <algorithm>
#include <cmath>

namespace nscond {

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  const double pos = std::clamp(prob, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

EnvelopeSet envelopes(std::span<const StatCurve> curves, double level) {
  if (curves.size() < kMinEnvelopeCurves) {
    throw InvalidArgument("envelopes need at least " + std::to_string(kMinEnvelopeCurves) +
                          " curves, got " + std::to_string(curves.size()));
  }
  if (!(level > 0.0 && level <= 1.0)) throw InvalidArgument("envelope level must be in (0, 1]");
  const StatCurve& first = curves.front();
  for (const StatCurve& c : curves) {
    if (c.kind != first.kind || c.source != first.source) {
      throw InvalidArgument("envelopes over curves of mixed kind or source");
    }
    if (!(c.grid == first.grid) || c.values.size() != first.grid.size()) {
      throw InvalidArgument("envelopes over curves on different distance grids");
    }
  }
  EnvelopeSet e{first.grid, first.kind, first.source, {}, {}, curves.size()};
  const std::size_t m = first.grid.size();
  e.lower.resize(m);
  e.upper.resize(m);
  std::vector<double> column(curves.size());
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t c = 0; c < curves.size(); ++c) column[c] = curves[c].values[k];
    std::sort(column.begin(), column.end());
    e.lower[k] = quantile_sorted(column, 0.5 * (1.0 - level));
    e.upper[k] = quantile_sorted(column, 0.5 * (1.0 + level));
  }
  return e;
}

namespace {

double trapezoid(const std::vector<double>& d, const std::vector<double>& w) {
  double area = 0.0;
  for (std::size_t k = 1; k < d.size(); ++k) area += 0.5 * (w[k] + w[k - 1]) * (d[k] - d[k - 1]);
  return area;
}

}  // namespace

double band_area(const EnvelopeSet& e) {
  std::vector<double> w(e.lower.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = e.upper[k] - e.lower[k];
  return trapezoid(e.grid.d, w);
}

Coverage coverage_tau(const EnvelopeSet& A, const EnvelopeSet& B) {
  if (!(A.grid == B.grid)) throw InvalidArgument("coverage between envelopes on different grids");
  const std::size_t m = A.grid.size();
  std::vector<double> inter(m);
  Coverage out;
  out.tau1_d.resize(m);
  out.tau2_d.resize(m);
  auto pct = [](double num, double den, bool contained) {
    if (den > 0.0) return std::min(100.0, 100.0 * num / den);
    return contained ? 100.0 : 0.0;
  };
  for (std::size_t k = 0; k < m; ++k) {
    const double lo = std::max(A.lower[k], B.lower[k]);
    const double hi = std::min(A.upper[k], B.upper[k]);
    inter[k] = std::max(0.0, hi - lo);
    const bool a_in_b = A.lower[k] >= B.lower[k] && A.upper[k] <= B.upper[k];
    const bool b_in_a = B.lower[k] >= A.lower[k] && B.upper[k] <= A.upper[k];
    out.tau1_d[k] = pct(inter[k], A.upper[k] - A.lower[k], a_in_b);
    out.tau2_d[k] = pct(inter[k], B.upper[k] - B.lower[k], b_in_a);
  }
  const double area_a = band_area(A);
  const double area_b = band_area(B);
  if (!(area_a > 0.0) || !(area_b > 0.0)) {
    throw DomainError("coverage rate undefined for a zero-area envelope");
  }
  const double area_i = trapezoid(A.grid.d, inter);
  out.tau1 = std::min(100.0, 100.0 * area_i / area_a);
  out.tau2 = std::min(100.0, 100.0 * area_i / area_b);
  return out;
}

}  // namespace nscond
