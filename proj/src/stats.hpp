#pragma once

// Interaction statistics between parents, offspring and the window boundary:
// empirical versions from point patterns and theoretical trends from a
// conditional parent intensity field.

#include <span>
#include <string_view>
#include <vector>

#include "condint.hpp"
#include "geom2d.hpp"
#include "model.hpp"

namespace nscond {

struct DistanceGrid {
  std::vector<double> d;  // d[0] = 0, strictly increasing

  static DistanceGrid make(std::vector<double> d);
  static DistanceGrid equispaced(double d_max, std::size_t count);

  std::size_t size() const { return d.size(); }
  double max() const { return d.back(); }
  friend bool operator==(const DistanceGrid&, const DistanceGrid&) = default;
};

enum class StatKind { H, E, Binner, Bouter };
enum class CurveSource { Observed, Simulated, Theoretical };

inline constexpr StatKind kAllKinds[] = {StatKind::H, StatKind::E, StatKind::Binner,
                                         StatKind::Bouter};

std::string_view kind_name(StatKind k);
std::string_view source_name(CurveSource s);

struct StatCurve {
  DistanceGrid grid;
  StatKind kind = StatKind::H;
  CurveSource source = CurveSource::Observed;
  std::vector<double> values;
};

StatCurve stat_H_emp(const PointPattern& parents, const DistanceGrid& grid);
StatCurve stat_E_emp(const PointPattern& offspring, const PointPattern& parents,
                     const DistanceGrid& grid);
StatCurve stat_B_emp(const PointPattern& parents, const Polyline& b_W, const DistanceGrid& grid,
                     StatKind kind = StatKind::Binner);

// rho averaged over the cells of a lattice of side <= q.h covering S, zero
// for cells whose centre is outside S. All theoretical statistics integrate
// over this raster.
Raster stat_raster(const CondParentField& rho, const Region& S, const QuadratureSpec& q);

StatCurve stat_H_theo(const Raster& rho_S, const DistanceGrid& grid);
StatCurve stat_E_theo(const PointPattern& offspring, const Raster& rho_S, const DistanceGrid& grid);
StatCurve stat_B_theo(const Raster& rho_S, const Polyline& b_W, const DistanceGrid& grid,
                      double step, StatKind kind = StatKind::Binner);

StatCurve stat_H_theo(const CondParentField& rho, const Region& S, const DistanceGrid& grid,
                      const QuadratureSpec& q);
StatCurve stat_E_theo(const PointPattern& offspring, const CondParentField& rho, const Region& S,
                      const DistanceGrid& grid, const QuadratureSpec& q);
StatCurve stat_B_theo(const CondParentField& rho, const Polyline& b_W, const Region& S,
                      const DistanceGrid& grid, const QuadratureSpec& q,
                      StatKind kind = StatKind::Binner);

}  // namespace nscond
