#pragma once

// Pointwise quantile envelopes across replicates and the band-overlap
// coverage rates between two envelopes.

#include <span>
#include <vector>

#include "stats.hpp"

namespace nscond {

inline constexpr std::size_t kMinEnvelopeCurves = 20;

struct EnvelopeSet {
  DistanceGrid grid;
  StatKind kind = StatKind::H;
  CurveSource source = CurveSource::Observed;
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t count = 0;
};

// Linear interpolation between order statistics (sample quantile type 7).
double quantile_sorted(std::span<const double> sorted, double prob);

// Quantiles at (1 - level)/2 and (1 + level)/2. Needs >= 20 curves of one
// kind on one grid.
EnvelopeSet envelopes(std::span<const StatCurve> curves, double level = 0.95);

// Trapezoid-rule area between the band's curves.
double band_area(const EnvelopeSet& e);

struct Coverage {
  double tau1 = 0.0;  // nu(A ∩ B) / nu(A), percent
  double tau2 = 0.0;  // nu(A ∩ B) / nu(B), percent
  std::vector<double> tau1_d;
  std::vector<double> tau2_d;
};

Coverage coverage_tau(const EnvelopeSet& A, const EnvelopeSet& B);

}  // namespace nscond
