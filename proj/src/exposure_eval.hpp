#pragma once

#include <optional>
#include <vector>

#include "geom2d.hpp"
#include "model.hpp"

namespace nscond {

// J(y) with the window's rectangle decomposition computed once.
class ExposureEvaluator {
 public:
  ExposureEvaluator(const ClusterModel& model, const ThinningField& p, const Region& W,
                    const QuadratureSpec& q);

  double operator()(Point y) const;
  bool has_exact() const { return rects_.has_value(); }
  double exact(Point y) const;  // requires has_exact()
  double quadrature(Point y) const;

 private:
  ClusterModel model_;
  ThinningField p_;
  Region W_;
  QuadratureSpec q_;
  std::optional<std::vector<SignedRect>> rects_;
};

}  // namespace nscond
