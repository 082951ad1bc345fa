#include "geom2d.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace nscond {

Rect Rect::make(double xmin, double ymin, double xmax, double ymax) {
  if (std::isnan(xmin) || std::isnan(ymin) || std::isnan(xmax) || std::isnan(ymax)) {
    throw InvalidArgument("rectangle bounds must not be NaN");
  }
  if (!(xmin < xmax) || !(ymin < ymax)) {
    throw InvalidArgument("rectangle requires xmin < xmax and ymin < ymax");
  }
  return Rect{xmin, ymin, xmax, ymax};
}

bool Rect::finite() const {
  return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
         std::isfinite(ymax);
}

std::optional<Rect> intersection(const Rect& a, const Rect& b) {
  const Rect r{std::max(a.xmin, b.xmin), std::max(a.ymin, b.ymin), std::min(a.xmax, b.xmax),
               std::min(a.ymax, b.ymax)};
  if (r.xmin >= r.xmax || r.ymin >= r.ymax) return std::nullopt;
  return r;
}

Rect bounding_union(const Rect& a, const Rect& b) {
  return Rect{std::min(a.xmin, b.xmin), std::min(a.ymin, b.ymin), std::max(a.xmax, b.xmax),
              std::max(a.ymax, b.ymax)};
}

double distance_to_rect(Point p, const Rect& r) {
  const double dx = std::max({r.xmin - p.x, 0.0, p.x - r.xmax});
  const double dy = std::max({r.ymin - p.y, 0.0, p.y - r.ymax});
  return std::hypot(dx, dy);
}

Disc Disc::make(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("disc radius must be positive and finite");
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw InvalidArgument("disc centre must be finite");
  }
  return Disc{center, radius};
}

double distance_to_segment(Point p, const Segment& s) {
  const double vx = s.b.x - s.a.x;
  const double vy = s.b.y - s.a.y;
  const double len2 = vx * vx + vy * vy;
  if (len2 == 0.0) return distance(p, s.a);
  double t = ((p.x - s.a.x) * vx + (p.y - s.a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, Point{s.a.x + t * vx, s.a.y + t * vy});
}

double clipped_length(const Segment& s, const Disc& d) {
  const double vx = s.b.x - s.a.x;
  const double vy = s.b.y - s.a.y;
  const double a = vx * vx + vy * vy;
  if (a == 0.0) return 0.0;
  const double wx = s.a.x - d.center.x;
  const double wy = s.a.y - d.center.y;
  const double b = 2.0 * (wx * vx + wy * vy);
  const double c = wx * wx + wy * wy - d.radius * d.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return 0.0;
  const double root = std::sqrt(disc);
  const double t1 = std::max((-b - root) / (2.0 * a), 0.0);
  const double t2 = std::min((-b + root) / (2.0 * a), 1.0);
  if (t2 <= t1) return 0.0;
  return (t2 - t1) * std::sqrt(a);
}

Polyline Polyline::make(std::vector<Point> vertices, bool closed) {
  if (vertices.size() < 2) throw InvalidArgument("polyline needs at least two vertices");
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    if (vertices[i] == vertices[i - 1]) {
      throw InvalidArgument("polyline has repeated consecutive vertex " + std::to_string(i));
    }
  }
  if (closed && vertices.front() == vertices.back()) {
    throw InvalidArgument("closed polyline must not repeat its first vertex");
  }
  return Polyline{std::move(vertices), closed};
}

Polyline Polyline::of_rect(const Rect& r) {
  return make({{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax}, {r.xmin, r.ymax}}, true);
}

std::vector<Segment> Polyline::segments() const {
  std::vector<Segment> out;
  for (std::size_t i = 1; i < vertices.size(); ++i) out.push_back({vertices[i - 1], vertices[i]});
  if (closed && vertices.size() > 2) out.push_back({vertices.back(), vertices.front()});
  return out;
}

double Polyline::length() const {
  double total = 0.0;
  for (const auto& s : segments()) total += s.length();
  return total;
}

Lattice Lattice::cover(const Rect& box, double h) {
  if (!box.finite()) throw InvalidArgument("lattice extent must be finite");
  if (!(h > 0.0)) throw InvalidArgument("lattice cell size must be positive");
  Lattice lat;
  lat.extent = box;
  const double w = std::max(box.width(), 0.0);
  const double ht = std::max(box.height(), 0.0);
  lat.nx = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w / h - 1e-9)));
  lat.ny = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ht / h - 1e-9)));
  lat.dx = w / static_cast<double>(lat.nx);
  lat.dy = ht / static_cast<double>(lat.ny);
  return lat;
}

std::optional<std::pair<std::size_t, std::size_t>> Lattice::locate(Point p) const {
  if (!extent.contains(p)) return std::nullopt;
  auto i = static_cast<std::size_t>((p.x - extent.xmin) / dx);
  auto j = static_cast<std::size_t>((p.y - extent.ymin) / dy);
  return std::make_pair(std::min(i, nx - 1), std::min(j, ny - 1));
}

double Raster::value_at(Point p) const {
  const auto cell = lattice.locate(p);
  if (!cell) {
    throw DomainError("raster queried outside its extent at (" + std::to_string(p.x) + ", " +
                      std::to_string(p.y) + ")");
  }
  return at(cell->first, cell->second);
}

double Raster::max_value() const {
  if (values.empty()) return 0.0;
  return *std::max_element(values.begin(), values.end());
}

// ---------------------------------------------------------------------------
// Region expression tree

struct Region::Node {
  enum class Kind { Rect, Disc, Union, Intersection, Difference, Dilate };
  Kind kind = Kind::Rect;
  nscond::Rect rect{};
  nscond::Disc disc{};
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
  double radius = 0.0;
  std::vector<Segment> outline;
  nscond::Rect box{};
};

namespace {

using NodePtr = std::shared_ptr<const Region::Node>;

}  // namespace

static bool node_contains(const Region::Node& n, Point p);

static bool is_leaf(const Region::Node& n) {
  return n.kind == Region::Node::Kind::Rect || n.kind == Region::Node::Kind::Disc;
}

static double leaf_distance(const Region::Node& n, Point p) {
  if (n.kind == Region::Node::Kind::Rect) return distance_to_rect(p, n.rect);
  return std::max(0.0, distance(p, n.disc.center) - n.disc.radius);
}

static bool node_contains(const Region::Node& n, Point p) {
  using K = Region::Node::Kind;
  switch (n.kind) {
    case K::Rect:
      return n.rect.contains(p);
    case K::Disc:
      return n.disc.contains(p);
    case K::Union:
      return node_contains(*n.a, p) || node_contains(*n.b, p);
    case K::Intersection:
      return node_contains(*n.a, p) && node_contains(*n.b, p);
    case K::Difference:
      return node_contains(*n.a, p) && !node_contains(*n.b, p);
    case K::Dilate: {
      if (!n.box.contains(p)) return false;
      if (is_leaf(*n.a)) return leaf_distance(*n.a, p) <= n.radius;
      if (node_contains(*n.a, p)) return true;
      const double r2 = n.radius * n.radius;
      for (const auto& s : n.outline) {
        // cheap bounding test before the exact distance
        if (std::min(s.a.x, s.b.x) - n.radius > p.x || std::max(s.a.x, s.b.x) + n.radius < p.x ||
            std::min(s.a.y, s.b.y) - n.radius > p.y || std::max(s.a.y, s.b.y) + n.radius < p.y) {
          continue;
        }
        const double dd = distance_to_segment(p, s);
        if (dd * dd <= r2) return true;
      }
      return false;
    }
  }
  return false;
}

namespace {

struct BasePiece {
  Segment seg;
  Point probe;   // point on the leaf boundary used for the on-boundary test
  Point normal;  // unit outward normal of the leaf at the probe
};

void collect_leaf_edges(const Region::Node& n, const Rect& clip, double resolution,
                        std::vector<std::vector<BasePiece>>& edges) {
  using K = Region::Node::Kind;
  switch (n.kind) {
    case K::Rect: {
      const Rect r{std::max(n.rect.xmin, clip.xmin), std::max(n.rect.ymin, clip.ymin),
                   std::min(n.rect.xmax, clip.xmax), std::min(n.rect.ymax, clip.ymax)};
      if (r.xmin > r.xmax || r.ymin > r.ymax) return;
      const Point corners[4] = {{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax}, {r.xmin, r.ymax}};
      const Point normals[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
      for (int e = 0; e < 4; ++e) {
        const Point p0 = corners[e];
        const Point p1 = corners[(e + 1) % 4];
        const double len = distance(p0, p1);
        if (len == 0.0) continue;
        const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / resolution)));
        std::vector<BasePiece> pieces;
        pieces.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
          const double t0 = static_cast<double>(k) / static_cast<double>(m);
          const double t1 = static_cast<double>(k + 1) / static_cast<double>(m);
          const Point a{p0.x + t0 * (p1.x - p0.x), p0.y + t0 * (p1.y - p0.y)};
          const Point b{p0.x + t1 * (p1.x - p0.x), p0.y + t1 * (p1.y - p0.y)};
          pieces.push_back({{a, b}, {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, normals[e]});
        }
        edges.push_back(std::move(pieces));
      }
      return;
    }
    case K::Disc: {
      const double circumference = 2.0 * kPi * n.disc.radius;
      const auto m = std::max<std::size_t>(
          16, static_cast<std::size_t>(std::ceil(circumference / resolution)));
      std::vector<BasePiece> pieces;
      pieces.reserve(m);
      const Point c = n.disc.center;
      const double rr = n.disc.radius;
      for (std::size_t k = 0; k < m; ++k) {
        const double th0 = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
        const double th1 = 2.0 * kPi * static_cast<double>(k + 1) / static_cast<double>(m);
        const double thm = 0.5 * (th0 + th1);
        const Point a{c.x + rr * std::cos(th0), c.y + rr * std::sin(th0)};
        const Point b{c.x + rr * std::cos(th1), c.y + rr * std::sin(th1)};
        const Point nrm{std::cos(thm), std::sin(thm)};
        pieces.push_back({{a, b}, {c.x + rr * nrm.x, c.y + rr * nrm.y}, nrm});
      }
      edges.push_back(std::move(pieces));
      return;
    }
    case K::Union:
    case K::Intersection:
    case K::Difference:
      collect_leaf_edges(*n.a, clip, resolution, edges);
      collect_leaf_edges(*n.b, clip, resolution, edges);
      return;
    case K::Dilate:
      throw InvalidArgument("dilation of a region that already contains a dilation is not supported");
  }
}

std::vector<Segment> build_outline(const Region::Node& n, double resolution) {
  const Rect clip = n.box;
  if (!clip.finite()) throw InvalidArgument("cannot dilate an unbounded composite region");
  std::vector<std::vector<BasePiece>> edges;
  collect_leaf_edges(n, clip.expanded(1e-12), resolution, edges);
  const double eps = 1e-9 * std::max(1.0, clip.diameter());
  std::vector<Segment> out;
  for (const auto& edge : edges) {
    std::optional<Segment> run;
    for (const auto& piece : edge) {
      const Point outside{piece.probe.x + eps * piece.normal.x, piece.probe.y + eps * piece.normal.y};
      const Point inside{piece.probe.x - eps * piece.normal.x, piece.probe.y - eps * piece.normal.y};
      const bool on_boundary = node_contains(n, outside) != node_contains(n, inside);
      if (on_boundary) {
        if (run && run->b == piece.seg.a && edge.size() > 1 &&
            piece.normal == edge.front().normal) {
          run->b = piece.seg.b;  // collinear continuation along a straight edge
        } else {
          if (run) out.push_back(*run);
          run = piece.seg;
        }
      } else if (run) {
        out.push_back(*run);
        run.reset();
      }
    }
    if (run) out.push_back(*run);
  }
  return out;
}

Rect empty_box_at(const Rect& a) { return Rect{a.xmin, a.ymin, a.xmin, a.ymin}; }

}  // namespace

Region Region::rect(const Rect& r) {
  if (!(r.xmin < r.xmax) || !(r.ymin < r.ymax)) throw InvalidArgument("degenerate rectangle");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Rect;
  n->rect = r;
  n->box = r;
  return Region(std::move(n));
}

Region Region::disc(const Disc& d) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Disc;
  n->disc = Disc::make(d.center, d.radius);
  n->box = d.bbox();
  return Region(std::move(n));
}

Region unite(const Region& a, const Region& b) {
  auto n = std::make_shared<Region::Node>();
  n->kind = Region::Node::Kind::Union;
  n->a = a.node_;
  n->b = b.node_;
  n->box = bounding_union(a.node_->box, b.node_->box);
  return Region(std::move(n));
}

Region intersect(const Region& a, const Region& b) {
  auto n = std::make_shared<Region::Node>();
  n->kind = Region::Node::Kind::Intersection;
  n->a = a.node_;
  n->b = b.node_;
  n->box = intersection(a.node_->box, b.node_->box).value_or(empty_box_at(a.node_->box));
  return Region(std::move(n));
}

Region subtract(const Region& a, const Region& b) {
  auto n = std::make_shared<Region::Node>();
  n->kind = Region::Node::Kind::Difference;
  n->a = a.node_;
  n->b = b.node_;
  n->box = a.node_->box;
  return Region(std::move(n));
}

Region dilate(const Region& a, double r, double resolution) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("dilation radius must be >= 0");
  if (r == 0.0) return a;
  if (!(resolution > 0.0)) throw InvalidArgument("dilation resolution must be positive");
  auto n = std::make_shared<Region::Node>();
  n->kind = Region::Node::Kind::Dilate;
  n->a = a.node_;
  n->radius = r;
  n->box = a.node_->box.expanded(r);
  if (!is_leaf(*a.node_)) n->outline = build_outline(*a.node_, resolution);
  return Region(std::move(n));
}

bool Region::contains(Point p) const { return node_contains(*node_, p); }

Rect Region::bbox() const { return node_->box; }

static std::optional<std::vector<SignedRect>> node_signed_rects(const Region::Node& n) {
  using K = Region::Node::Kind;
  auto product = [](const std::vector<SignedRect>& x, const std::vector<SignedRect>& y) {
    std::vector<SignedRect> out;
    for (const auto& p : x) {
      for (const auto& q : y) {
        if (auto r = intersection(p.rect, q.rect)) out.push_back({*r, p.sign * q.sign});
      }
    }
    return out;
  };
  switch (n.kind) {
    case K::Rect:
      return std::vector<SignedRect>{{n.rect, 1.0}};
    case K::Disc:
    case K::Dilate:
      return std::nullopt;
    case K::Union:
    case K::Intersection:
    case K::Difference: {
      auto a = node_signed_rects(*n.a);
      auto b = node_signed_rects(*n.b);
      if (!a || !b) return std::nullopt;
      auto ab = product(*a, *b);
      std::vector<SignedRect> out;
      if (n.kind == K::Intersection) return ab;
      out = *a;
      if (n.kind == K::Union) out.insert(out.end(), b->begin(), b->end());
      for (auto& s : ab) out.push_back({s.rect, -s.sign});
      return out;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<SignedRect>> Region::signed_rects() const {
  return node_signed_rects(*node_);
}

std::optional<std::pair<Rect, Rect>> Region::rect_with_hole() const {
  if (node_->kind != Node::Kind::Difference) return std::nullopt;
  if (node_->a->kind != Node::Kind::Rect || node_->b->kind != Node::Kind::Rect) return std::nullopt;
  return std::make_pair(node_->a->rect, node_->b->rect);
}

std::optional<Rect> Region::as_rect() const {
  if (node_->kind != Node::Kind::Rect) return std::nullopt;
  return node_->rect;
}

// ---------------------------------------------------------------------------
// Exact disc ∩ rectangle

namespace {

// Area and x-moment of {x0 <= x <= x1, y >= h} ∩ disc(0, R), for h >= 0.
AreaMoments strip_above(double x0, double x1, double h, double R) {
  if (h >= R) return {};
  const double s = std::sqrt(R * R - h * h);
  const double a = std::clamp(x0, -s, s);
  const double b = std::clamp(x1, -s, s);
  if (b <= a) return {};
  auto G = [&](double x) {
    const double root = std::sqrt(std::max(R * R - x * x, 0.0));
    return 0.5 * (x * root + R * R * std::asin(std::clamp(x / R, -1.0, 1.0))) - h * x;
  };
  auto Gm = [&](double x) {
    const double w = std::max(R * R - x * x, 0.0);
    return -w * std::sqrt(w) / 3.0 - 0.5 * h * x * x;
  };
  return {G(b) - G(a), Gm(b) - Gm(a)};
}

AreaMoments band(double x0, double x1, double y0, double y1, double R) {
  // y0 < y1 assumed
  auto diff = [](AreaMoments p, AreaMoments q) { return AreaMoments{p.area - q.area, p.mx - q.mx}; };
  auto sum = [](AreaMoments p, AreaMoments q) { return AreaMoments{p.area + q.area, p.mx + q.mx}; };
  if (y0 >= 0.0) return diff(strip_above(x0, x1, y0, R), strip_above(x0, x1, y1, R));
  if (y1 <= 0.0) return diff(strip_above(x0, x1, -y1, R), strip_above(x0, x1, -y0, R));
  return sum(diff(strip_above(x0, x1, 0.0, R), strip_above(x0, x1, y1, R)),
             diff(strip_above(x0, x1, 0.0, R), strip_above(x0, x1, -y0, R)));
}

}  // namespace

AreaMoments disc_rect_moments(const Disc& d, const Rect& r) {
  const double R = d.radius;
  // Edges within rounding of the disc's extreme are snapped onto it; asin is
  // ill-conditioned at ±1 and would otherwise amplify the rounding.
  const double snap = 1e-12 * R;
  auto lo = [&](double v) { return v <= -R + snap ? -R : v; };
  auto hi = [&](double v) { return v >= R - snap ? R : v; };
  const double x0 = lo(r.xmin - d.center.x);
  const double x1 = hi(r.xmax - d.center.x);
  const double y0 = lo(r.ymin - d.center.y);
  const double y1 = hi(r.ymax - d.center.y);
  if (x0 >= x1 || y0 >= y1) return {};
  AreaMoments local = band(x0, x1, y0, y1, R);
  local.area = std::max(local.area, 0.0);
  return {local.area, local.mx + d.center.x * local.area};
}

double measure(const Region& region, const QuadratureSpec& q) {
  if (!region.is_bounded()) throw InvalidArgument("measure of an unbounded region");
  return integrate([](Point) { return 1.0; }, region, q);
}

double disc_region_measure(const Disc& d, const Region& region, const QuadratureSpec& q) {
  return measure(intersect(Region::disc(d), region), q);
}

std::optional<double> disc_region_measure_exact(const Disc& d, const Region& region) {
  const auto rects = region.signed_rects();
  if (!rects) return std::nullopt;
  double total = 0.0;
  for (const auto& s : *rects) total += s.sign * disc_rect_moments(d, s.rect).area;
  return std::clamp(total, 0.0, d.area());
}

Polyline boundary(const Region& region, BoundarySide side) {
  const auto parts = region.rect_with_hole();
  if (!parts) {
    throw InvalidArgument("boundary() needs a rectangle with a rectangular hole");
  }
  return Polyline::of_rect(side == BoundarySide::Inner ? parts->second : parts->first);
}

double arc_length_in_disc(const Polyline& b, const Disc& d) {
  double total = 0.0;
  for (const auto& s : b.segments()) total += clipped_length(s, d);
  return total;
}

}  // namespace nscond
