#pragma once

// Conditional parent intensity rho(y | Phi_W) and conditional offspring
// intensity lambda(x_o | Phi_W) for the thinned Matérn cluster process.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "geom2d.hpp"
#include "model.hpp"

namespace nscond {

// k(u) for a displacement u.
double kernel_density(const ClusterModel& model, Point u);

// J(y) = ∫_W p(z) k(y - z) dz, the expected fraction of a parent's offspring
// at y that is observed in W. Exact for rectangle-algebra windows, midpoint
// quadrature otherwise.
double exposure(Point y, const ClusterModel& model, const ThinningField& p, const Region& W,
                const QuadratureSpec& q);
std::optional<double> exposure_exact(Point y, const ClusterModel& model, const ThinningField& p,
                                     const Region& W);
double exposure_quadrature(Point y, const ClusterModel& model, const ThinningField& p,
                           const Region& W, const QuadratureSpec& q);

// c(y) = p(y) (1 - exp(-mu J)) / J, with limit mu p(y) at J = 0.
double normalizer_c(Point y, const ClusterModel& model, const ThinningField& p, const Region& W,
                    const QuadratureSpec& q);

// Weight c(y) / (mu p(y)) applied to the observed-offspring kernel sum; equal
// to (1 - exp(-mu J)) / (mu J), which stays defined when p(y) = 0.
double observed_weight(double exposure_value, double mu);

double rho_approx(Point y, const PointPattern& obs, const ClusterModel& model,
                  const ThinningField& p, const ObservationScheme& scheme, const QuadratureSpec& q);

// Per-cell exposure and the two obs-independent factors of rho_approx, built
// once per (model, p, W, lattice) and reused across observations.
struct ExposureMap {
  Lattice lattice;
  std::vector<double> exposure;  // J at cell centres
  std::vector<double> weight;    // observed_weight(J)
  std::vector<double> barren;    // kappa exp(-mu J)

  static ExposureMap build(const ClusterModel& model, const ThinningField& p, const Region& W,
                           const Lattice& lattice, const QuadratureSpec& q);
};

enum class Provenance { Approx, Baudin, Oracle, Constant };
std::string_view provenance_name(Provenance p);

struct CondParentField {
  Raster values;
  double bound = 0.0;  // supremum bound used for Poisson sampling
  Provenance provenance = Provenance::Approx;

  double at(Point y) const { return values.value_at(y); }
  const Lattice& lattice() const { return values.lattice; }
};

// rho_approx on every cell of the map's lattice.
CondParentField build_rho_field(const ExposureMap& map, const PointPattern& obs,
                                const ClusterModel& model);
CondParentField constant_rho_field(const Lattice& lattice, double value);

// Bound = 1.05 * max; the field is piecewise constant so this dominates it.
double field_bound(const Raster& values);

// Eq.-(2)-form: mu p(x_o) ∫_{W∪∂W} k(y - x_o) rho(y) dy
//             + mu kappa p(x_o) ∫_{b(x_o,r) \ (W∪∂W)} k(y - x_o) dy,
// the second integral taken as 1 - ∫_{b ∩ (W∪∂W)} k since k has unit mass.
double lambda_cond(Point x_o, const CondParentField& rho, const ClusterModel& model,
                   const ThinningField& p, const ObservationScheme& scheme,
                   const QuadratureSpec& q);

// Uniform-disc specialisation:
// mu p / (pi r^2) ∫_{b ∩ (W∪∂W)} rho + kappa mu p nu(b \ (W∪∂W)) / (pi r^2).
double lambda_cond_matern(Point x_o, const CondParentField& rho, const ClusterModel& model,
                          const ThinningField& p, const ObservationScheme& scheme,
                          const QuadratureSpec& q);

struct CondIntensityField {
  Raster values;
};

CondIntensityField lambda_field(const Lattice& lattice, const Region& prediction,
                                const CondParentField& rho, const ClusterModel& model,
                                const ThinningField& p, const ObservationScheme& scheme,
                                const QuadratureSpec& q);

// ---------------------------------------------------------------------------
// Exact conditional parent intensity by enumeration of set partitions of the
// observed points. Practical for n <= 8.

inline constexpr std::size_t kMaxExactObservations = 8;

class BaudinPosterior {
 public:
  BaudinPosterior(const PointPattern& obs, const ClusterModel& model, const ThinningField& p,
                  const Region& W, const QuadratureSpec& q);

  double operator()(Point y) const;

  std::size_t observation_count() const { return obs_.size(); }
  // S(a) for the subset encoded by `mask`.
  double cluster_mass(std::uint32_t mask) const { return mass_[mask]; }
  // Posterior probability of each set partition, in restricted-growth order.
  const std::vector<double>& partition_probabilities() const { return partition_prob_; }

 private:
  std::vector<Point> obs_;
  ClusterModel model_;
  ThinningField p_;
  Region W_;
  QuadratureSpec q_;
  std::vector<double> mass_;            // indexed by subset mask
  std::vector<double> block_weight_;    // sum of probabilities of partitions containing the block
  std::vector<double> partition_prob_;
};

double baudin_exact(Point y, const PointPattern& obs, const ClusterModel& model,
                    const ThinningField& p, const Region& W, const QuadratureSpec& q);

// Number of set partitions of an n-set.
std::uint64_t bell_number(unsigned n);

// Visits every set partition of {0..n-1} as a list of block bitmasks.
template <class F>
void for_each_set_partition(unsigned n, F&& visit);

// ---------------------------------------------------------------------------
// Monte Carlo reference for rho(y | Phi_W).

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct OracleDiagnostics {
  std::size_t samples = 0;
  std::size_t nonzero_weights = 0;
  double effective_sample_size = 0.0;
};

std::vector<OracleEstimate> importance_oracle(std::span<const Point> y_grid,
                                              const PointPattern& obs, const ClusterModel& model,
                                              const ThinningField& p,
                                              const ObservationScheme& scheme, std::size_t M,
                                              Seed seed, OracleDiagnostics* diagnostics = nullptr);

// ---------------------------------------------------------------------------

template <class F>
void for_each_set_partition(unsigned n, F&& visit) {
  if (n == 0) {
    const std::vector<std::uint32_t> none;
    visit(std::span<const std::uint32_t>(none));
    return;
  }
  // restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1])
  std::vector<unsigned> a(n, 0);
  std::vector<unsigned> mx(n, 0);
  std::vector<std::uint32_t> blocks;
  while (true) {
    blocks.assign(mx[n - 1] + 1, 0u);
    for (unsigned i = 0; i < n; ++i) blocks[a[i]] |= (1u << i);
    visit(std::span<const std::uint32_t>(blocks));
    int i = static_cast<int>(n) - 1;
    while (i > 0 && a[i] == mx[i - 1] + 1) --i;
    if (i == 0) return;
    ++a[i];
    mx[i] = std::max(mx[i - 1], a[i]);
    for (unsigned k = static_cast<unsigned>(i) + 1; k < n; ++k) {
      a[k] = 0;
      mx[k] = mx[k - 1];
    }
  }
}

}  // namespace nscond
