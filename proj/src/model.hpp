#pragma once

// Thinned Neyman-Scott (Matérn) cluster model and its samplers.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geom2d.hpp"
#include "rng.hpp"

namespace nscond {

// Offspring displacement density: uniform on the closed disc of radius `range`.
struct DispersalKernel {
  double range = 0.0;

  static DispersalKernel uniform_disc(double range);

  double density(double dx, double dy) const {
    return dx * dx + dy * dy <= range * range ? peak() : 0.0;
  }
  double peak() const { return 1.0 / (kPi * range * range); }
  // F(A): kernel mass of the set A - centre.
  double mass(Point centre, const Region& region, const QuadratureSpec& q) const;
};

struct ClusterModel {
  double kappa = 0.0;  // parent intensity
  double mu = 0.0;     // mean offspring per parent
  DispersalKernel kernel;

  static ClusterModel make(double kappa, double mu, double range);

  double range() const { return kernel.range; }
  // Probability generating function of the Poisson(mu) cluster size.
  double pgf(double z) const { return std::exp(mu * (z - 1.0)); }
  // m-th derivative of the generating function.
  double pgf_derivative(int m, double z) const { return std::pow(mu, m) * pgf(z); }
};

// Deterministic retention probability p(x) in [0, 1].
class ThinningField {
 public:
  struct Constant {
    double alpha;
  };
  // alpha1 for x1 <= v, alpha2 for x1 > v
  struct Step {
    double alpha1;
    double alpha2;
    double v;
  };
  // clamp(intercept + slope * x1, 0, 1)
  struct Linear {
    double intercept;
    double slope;
  };
  struct Grid {
    Lattice lattice;
    std::vector<double> values;
  };
  using Variant = std::variant<Constant, Step, Linear, Grid>;

  static ThinningField constant(double alpha);
  static ThinningField step(double alpha1, double alpha2, double v);
  static ThinningField linear(double intercept = 1.0, double slope = -1.0);
  static ThinningField grid(const Rect& extent, std::size_t nx, std::size_t ny,
                            std::vector<double> values);

  // Throws DomainError where p is undefined (outside a grid's extent).
  double operator()(Point x) const;
  double upper_bound() const;
  std::string_view name() const;
  const Variant& variant() const { return v_; }

  // p restricted to `box` as pieces p(x) = a + b * x1 on disjoint rectangles.
  // Pieces where p vanishes are omitted.
  struct Piece {
    Rect where;
    double a;
    double b;
  };
  std::vector<Piece> pieces_within(const Rect& box) const;

 private:
  explicit ThinningField(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

enum class Role { Parent, Offspring, Thinned };
std::string_view role_name(Role r);
Role parse_role(std::string_view s);

struct PointPattern {
  std::vector<Point> points;
  Region carrier;
  Role role = Role::Parent;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  PointPattern restricted_to(const Region& region) const;
};

// Study region S, observation window W and the border ring of width r.
struct ObservationScheme {
  Region S;
  Region W;
  std::optional<Rect> hole;
  double r = 0.0;
  Region W_dilated;  // W ∪ ∂W
  Region border;     // ∂W = W⊕r \ W
  Region S_dilated;  // S⊕r, where ground-truth parents live

  static ObservationScheme make(const Region& S, const Region& W, double r, double resolution);
  // W = S \ hole, or W = S when there is no hole.
  static ObservationScheme with_hole(const Rect& S, std::optional<Rect> hole, double r,
                                     double resolution);
};

double intensity(const ClusterModel& model, const ThinningField& p, Point x);

PointPattern sample_homogeneous_poisson(double rate, const Region& region, Rng& rng,
                                        Role role = Role::Parent);
PointPattern sample_homogeneous_poisson(double rate, const Region& region, Seed seed,
                                        Role role = Role::Parent);

struct ClusterRealization {
  PointPattern parents;    // on S⊕r
  PointPattern offspring;  // clipped to S
  PointPattern thinned;    // retained offspring
};

ClusterRealization sample_thinned_cluster(const ClusterModel& model, const ThinningField& p,
                                          const ObservationScheme& scheme, Rng& rng);
ClusterRealization sample_thinned_cluster(const ClusterModel& model, const ThinningField& p,
                                          const ObservationScheme& scheme, Seed seed);

using IntensityFn = std::function<double(Point)>;

// Lewis-Shedler thinning of a Poisson(bound) pattern. Throws InvalidArgument
// if intensity_fn exceeds bound at a candidate point.
PointPattern sample_inhomogeneous_poisson(const IntensityFn& intensity_fn, double bound,
                                          const Region& region, Rng& rng,
                                          Role role = Role::Parent);
PointPattern sample_inhomogeneous_poisson(const IntensityFn& intensity_fn, double bound,
                                          const Region& region, Seed seed,
                                          Role role = Role::Parent);

}  // namespace nscond
