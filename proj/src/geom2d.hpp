#pragma once

// Planar region algebra, measures, boundaries and midpoint-grid quadrature.

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"

namespace nscond {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double distance_sq(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Axis-aligned closed rectangle. Bounds may be infinite (half-planes, strips).
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  static Rect make(double xmin, double ymin, double xmax, double ymax);

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool finite() const;
  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  Rect expanded(double margin) const {
    return Rect{xmin - margin, ymin - margin, xmax + margin, ymax + margin};
  }
  double diameter() const { return std::hypot(width(), height()); }

  friend bool operator==(const Rect&, const Rect&) = default;
};

std::optional<Rect> intersection(const Rect& a, const Rect& b);
Rect bounding_union(const Rect& a, const Rect& b);
double distance_to_rect(Point p, const Rect& r);

struct Disc {
  Point center;
  double radius = 0.0;

  static Disc make(Point center, double radius);
  Rect bbox() const {
    return Rect{center.x - radius, center.y - radius, center.x + radius, center.y + radius};
  }
  double area() const { return kPi * radius * radius; }
  bool contains(Point p) const { return distance_sq(p, center) <= radius * radius; }
};

struct Segment {
  Point a;
  Point b;
  double length() const { return distance(a, b); }
};

double distance_to_segment(Point p, const Segment& s);
// Length of the part of `s` lying inside the closed disc.
double clipped_length(const Segment& s, const Disc& d);

struct Polyline {
  std::vector<Point> vertices;
  bool closed = false;

  static Polyline make(std::vector<Point> vertices, bool closed);
  static Polyline of_rect(const Rect& r);

  std::vector<Segment> segments() const;
  double length() const;
};

struct QuadratureSpec {
  double h;

  explicit QuadratureSpec(double cell) : h(cell) {
    if (!(cell > 0.0) || !std::isfinite(cell)) {
      throw InvalidArgument("quadrature cell size must be a positive finite number");
    }
  }
};

// Regular cell grid exactly covering a finite rectangle with cells of side <= h.
struct Lattice {
  Rect extent;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  static Lattice cover(const Rect& box, double h);

  std::size_t size() const { return nx * ny; }
  double cell_area() const { return dx * dy; }
  Point center(std::size_t i, std::size_t j) const {
    return Point{extent.xmin + (static_cast<double>(i) + 0.5) * dx,
                 extent.ymin + (static_cast<double>(j) + 0.5) * dy};
  }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  // Cell containing p; nullopt outside the extent.
  std::optional<std::pair<std::size_t, std::size_t>> locate(Point p) const;
};

// Cell-centred samples of a scalar field.
struct Raster {
  Lattice lattice;
  std::vector<double> values;

  explicit Raster(Lattice lat, double fill = 0.0)
      : lattice(lat), values(lat.size(), fill) {}

  double& at(std::size_t i, std::size_t j) { return values[lattice.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values[lattice.index(i, j)]; }
  // Value of the cell containing p (piecewise-constant reading).
  double value_at(Point p) const;
  double max_value() const;
};

struct SignedRect {
  Rect rect;
  double sign;
};

// Immutable expression tree over Rect and Disc leaves. Cheap to copy and
// safe to share across threads.
class Region {
 public:
  static Region rect(const Rect& r);
  static Region disc(const Disc& d);

  friend Region unite(const Region& a, const Region& b);
  friend Region intersect(const Region& a, const Region& b);
  friend Region subtract(const Region& a, const Region& b);
  // Minkowski dilation by a disc of radius r. For composite operands the
  // boundary is resolved as a polygonal outline with pieces of length
  // <= resolution; rectangle-only composites come out exact.
  friend Region dilate(const Region& a, double r, double resolution);

  bool contains(Point p) const;
  Rect bbox() const;
  bool is_bounded() const { return bbox().finite(); }

  // Inclusion-exclusion form sum_i sign_i * 1{rect_i}, when every leaf is a
  // rectangle and no dilation is involved.
  std::optional<std::vector<SignedRect>> signed_rects() const;
  // (outer, hole) when the region is exactly Rect \ Rect.
  std::optional<std::pair<Rect, Rect>> rect_with_hole() const;
  std::optional<Rect> as_rect() const;

  struct Node;  // opaque

 private:
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Region unite(const Region& a, const Region& b);
Region intersect(const Region& a, const Region& b);
Region subtract(const Region& a, const Region& b);
Region dilate(const Region& a, double r, double resolution);

// Exact area and first x-moment of a disc clipped to a rectangle.
struct AreaMoments {
  double area = 0.0;
  double mx = 0.0;  // integral of x over the set, global coordinates
};
AreaMoments disc_rect_moments(const Disc& d, const Rect& r);

// Midpoint rule on the lattice covering the region's bounding box; a cell
// contributes when its centre lies in the region.
template <class F>
double integrate(F&& f, const Region& region, const QuadratureSpec& q) {
  const Rect box = region.bbox();
  if (!box.finite()) throw InvalidArgument("cannot integrate over an unbounded region");
  if (box.width() <= 0.0 || box.height() <= 0.0) return 0.0;
  const Lattice lat = Lattice::cover(box, q.h);
  double sum = 0.0;
  for (std::size_t j = 0; j < lat.ny; ++j) {
    for (std::size_t i = 0; i < lat.nx; ++i) {
      const Point c = lat.center(i, j);
      if (region.contains(c)) sum += f(c);
    }
  }
  return sum * lat.cell_area();
}

inline bool contains(const Region& region, Point p) { return region.contains(p); }
double measure(const Region& region, const QuadratureSpec& q);
// nu(d ∩ region). nu(d \ region) is d.area() minus this value.
double disc_region_measure(const Disc& d, const Region& region, const QuadratureSpec& q);
// Exact nu(d ∩ region) for rectangle-algebra regions.
std::optional<double> disc_region_measure_exact(const Disc& d, const Region& region);

enum class BoundarySide { Inner, Outer };
Polyline boundary(const Region& region, BoundarySide side);

double arc_length_in_disc(const Polyline& b, const Disc& d);

}  // namespace nscond
