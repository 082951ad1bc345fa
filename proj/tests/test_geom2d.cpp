#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "geom2d.hpp"

using namespace nscond;

namespace {

// Area of the part of a radius-R disc lying beyond a chord at signed
// distance h from the centre.
double cap_area(double R, double h) {
  if (h >= R) return 0.0;
  if (h <= -R) return kPi * R * R;
  return R * R * std::acos(h / R) - h * std::sqrt(R * R - h * h);
}

}  // namespace

TEST_CASE("rectangles reject inverted or non-finite bounds") {
  CHECK_THROWS_AS(Rect::make(1.0, 0.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Rect::make(0.0, 0.0, NAN, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Disc::make({0, 0}, -1.0), InvalidArgument);
  CHECK_THROWS_AS(QuadratureSpec(0.0), InvalidArgument);
  const Rect r = Rect::make(0.0, 0.0, 2.0, 1.0);
  CHECK(r.area() == doctest::Approx(2.0));
  CHECK(r.contains({2.0, 1.0}));
  CHECK_FALSE(r.contains({2.0001, 1.0}));
}

TEST_CASE("lattice covers a rectangle exactly with cells no larger than h") {
  const Rect box{0.1, -0.3, 0.83, 0.5};
  const Lattice lat = Lattice::cover(box, 0.07);
  CHECK(lat.dx <= 0.07 + 1e-15);
  CHECK(lat.dy <= 0.07 + 1e-15);
  CHECK(static_cast<double>(lat.nx) * lat.dx == doctest::Approx(box.width()).epsilon(1e-14));
  CHECK(static_cast<double>(lat.ny) * lat.dy == doctest::Approx(box.height()).epsilon(1e-14));
  const auto cell = lat.locate({0.1 + 1.5 * lat.dx, -0.3 + 0.2 * lat.dy});
  REQUIRE(cell);
  CHECK(cell->first == 1);
  CHECK(cell->second == 0);
  CHECK_FALSE(lat.locate({-1.0, 0.0}));

  Raster ras(lat, 2.5);
  CHECK(ras.value_at({0.5, 0.0}) == 2.5);
  CHECK_THROWS_AS(ras.value_at({5.0, 0.0}), DomainError);
}

TEST_CASE("disc clipped by a half-plane matches the circular segment formula") {
  const double R = 0.09;
  const Point c{0.5, 0.5};
  for (double h : {-0.08, -0.03, 0.0, 0.02, 0.07}) {
    // keep x <= c.x + h  =>  clipped-away cap beyond distance h
    const Rect half{-10.0, -10.0, c.x + h, 10.0};
    const double expected = kPi * R * R - cap_area(R, h);
    const AreaMoments m = disc_rect_moments(Disc{c, R}, half);
    CHECK(m.area == doctest::Approx(expected).epsilon(1e-12));

    const Region region = Region::rect(half);
    const auto exact = disc_region_measure_exact(Disc{c, R}, region);
    REQUIRE(exact);
    CHECK(std::abs(*exact - expected) < 1e-12);
    const double quad = disc_region_measure(Disc{c, R}, region, QuadratureSpec(R / 50.0));
    CHECK(std::abs(quad - expected) < 1e-4);
  }
}

TEST_CASE("first moment of a clipped disc") {
  const Disc d{{0.3, 0.2}, 0.1};
  const AreaMoments full = disc_rect_moments(d, Rect{-1, -1, 1, 1});
  CHECK(full.area == doctest::Approx(kPi * 0.01).epsilon(1e-13));
  CHECK(full.mx == doctest::Approx(kPi * 0.01 * 0.3).epsilon(1e-13));
  // half disc right of the centre: centroid at 4R/(3 pi) from the chord
  const AreaMoments right = disc_rect_moments(d, Rect{0.3, -1, 1, 1});
  CHECK(right.area == doctest::Approx(kPi * 0.01 / 2).epsilon(1e-13));
  CHECK(right.mx / right.area == doctest::Approx(0.3 + 4 * 0.1 / (3 * kPi)).epsilon(1e-12));
  const AreaMoments none = disc_rect_moments(d, Rect{0.5, 0.5, 0.6, 0.6});
  CHECK(none.area == 0.0);
}

TEST_CASE("disc inside a window with a hole: measure against the cap formula") {
  const Region S = Region::rect({0, 0, 1, 1});
  const Region W = subtract(S, Region::rect({0.35, 0.35, 0.65, 0.65}));
  const double R = 0.09;
  // centre left of the hole; the disc crosses only the hole's left edge
  for (double gap : {0.0, 0.03, 0.06, 0.1}) {
    const Disc d{{0.35 - gap, 0.5}, R};
    const double expected = kPi * R * R - cap_area(R, gap);
    const auto exact = disc_region_measure_exact(d, W);
    REQUIRE(exact);
    CHECK(std::abs(*exact - expected) < 1e-12);
    CHECK(std::abs(disc_region_measure(d, W, QuadratureSpec(R / 100.0)) - expected) < 1e-4);
  }
  // corner of S: quarter disc
  const Disc corner{{0.0, 0.0}, R};
  CHECK(std::abs(disc_region_measure(corner, W, QuadratureSpec(R / 50.0)) -
                 kPi * R * R / 4) < 1e-4);
}

TEST_CASE("exact and quadrature measures agree on random rectangle algebra") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = u(rng), b = u(rng), c = u(rng), e = u(rng);
    const Rect outer{0, 0, 1, 1};
    const Rect hole{std::min(a, b) * 0.9, std::min(c, e) * 0.9, std::max(a, b) * 0.9 + 0.05,
                    std::max(c, e) * 0.9 + 0.05};
    const Region W = subtract(Region::rect(outer), Region::rect(hole));
    const double R = 0.02 + 0.15 * u(rng);
    const Disc d{{u(rng) * 1.2 - 0.1, u(rng) * 1.2 - 0.1}, R};
    const auto exact = disc_region_measure_exact(d, W);
    REQUIRE(exact);
    const double quad = disc_region_measure(d, W, QuadratureSpec(R / 200.0));
    CHECK(std::abs(*exact - quad) < 1e-4);
    CHECK(*exact >= -1e-15);
    CHECK(*exact <= d.area() + 1e-15);
  }
}

TEST_CASE("measure is monotone and additive on rectangle pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QuadratureSpec q(0.01);
  auto random_rect = [&] {
    const double x = u(rng) * 0.8, y = u(rng) * 0.8;
    return Rect{x, y, x + 0.05 + 0.3 * u(rng), y + 0.05 + 0.3 * u(rng)};
  };
  for (int trial = 0; trial < 100; ++trial) {
    const Region A = Region::rect(random_rect());
    const Region B = Region::rect(random_rect());
    // cell-centre counting misclassifies at most a band of width h along
    // the boundary of the bounding box of either operand
    const Rect hull = unite(A, B).bbox();
    const double tol = 2.0 * (hull.width() + hull.height()) * q.h;
    const double mA = measure(A, q), mB = measure(B, q);
    const double mU = measure(unite(A, B), q), mI = measure(intersect(A, B), q);
    CHECK(mI <= mA + 2 * tol);
    CHECK(mA <= mU + 2 * tol);
    CHECK(std::abs(mU + mI - mA - mB) <= 4 * tol);
  }
}

TEST_CASE("disc measure splits between a region and its complement in the box") {
  const Region W = subtract(Region::rect({0, 0, 1, 1}), Region::rect({0.35, 0.35, 0.65, 0.65}));
  const Region box = Region::rect({-1, -1, 2, 2});
  const Region rest = subtract(box, W);
  const double R = 0.09;
  for (Point c : {Point{0.35, 0.4}, Point{0.0, 0.0}, Point{0.5, 0.5}, Point{0.3, 0.62}}) {
    const Disc d{c, R};
    const double q = R / 100.0;
    const double total =
        disc_region_measure(d, W, QuadratureSpec(q)) + disc_region_measure(d, rest, QuadratureSpec(q));
    CHECK(std::abs(total - kPi * R * R) < 1e-4);
  }
}

TEST_CASE("region algebra membership") {
  const Region a = Region::rect({0, 0, 1, 1});
  const Region b = Region::disc({{1, 1}, 0.5});
  const Region u = unite(a, b);
  const Region i = intersect(a, b);
  const Region d = subtract(a, b);
  for (Point p : {Point{0.9, 0.9}, Point{0.2, 0.2}, Point{1.2, 1.2}, Point{2, 2}}) {
    CHECK(u.contains(p) == (a.contains(p) || b.contains(p)));
    CHECK(i.contains(p) == (a.contains(p) && b.contains(p)));
    CHECK(d.contains(p) == (a.contains(p) && !b.contains(p)));
  }
  CHECK(i.bbox().xmin == doctest::Approx(0.5));
  CHECK(u.bbox().xmax == doctest::Approx(1.5));
  CHECK_FALSE(u.signed_rects());
  const auto sr = subtract(a, Region::rect({0.2, 0.2, 0.4, 0.4})).signed_rects();
  REQUIRE(sr);
  double area = 0.0;
  for (const auto& s : *sr) area += s.sign * s.rect.area();
  CHECK(area == doctest::Approx(1.0 - 0.04));
}

TEST_CASE("dilation of a rectangle has Steiner area") {
  const double r = 0.1;
  const Region R = Region::rect({0, 0, 1, 0.5});
  const Region D = dilate(R, r, r / 10);
  CHECK(D.contains({1.07, 0.57}));         // within r of the corner
  CHECK_FALSE(D.contains({1.08, 0.58}));   // beyond r of the corner
  const double expected = 0.5 + 3.0 * r + kPi * r * r;
  CHECK(std::abs(measure(D, QuadratureSpec(0.002)) - expected) < 2e-4);
}

TEST_CASE("dilation of a window with a hole shrinks the hole by r") {
  const double r = 0.05;
  const Region W = subtract(Region::rect({0, 0, 1, 1}), Region::rect({0.35, 0.35, 0.65, 0.65}));
  const Region Wd = dilate(W, r, r / 10);
  CHECK(Wd.contains({0.39, 0.5}));
  CHECK_FALSE(Wd.contains({0.41, 0.5}));
  CHECK_FALSE(Wd.contains({0.5, 0.5}));
  CHECK(Wd.contains({-0.04, 0.5}));
  CHECK(Wd.contains({1.03, 1.03}));
  CHECK_FALSE(Wd.contains({1.04, 1.04}));
  // the hole's corners stay sharp after dilating W: the remaining hole is a
  // square of side 0.3 - 2r
  const double hole_left = 0.3 - 2 * r;
  const double expected = (1 + 2 * r) * (1 + 2 * r) - (4 - kPi) * r * r - hole_left * hole_left;
  CHECK(std::abs(measure(Wd, QuadratureSpec(0.002)) - expected) < 5e-4);
}

TEST_CASE("boundary polylines and clipped arc length") {
  const Region W = subtract(Region::rect({0, 0, 1, 1}), Region::rect({0.35, 0.35, 0.65, 0.65}));
  const Polyline inner = boundary(W, BoundarySide::Inner);
  const Polyline outer = boundary(W, BoundarySide::Outer);
  CHECK(inner.length() == doctest::Approx(1.2));
  CHECK(outer.length() == doctest::Approx(4.0));
  // parent on a straight edge: the disc cuts a chord of length 2d
  for (double d : {0.01, 0.05, 0.1}) {
    CHECK(arc_length_in_disc(outer, Disc{{0.5, 0.0}, d}) == doctest::Approx(2 * d));
  }
  // at distance t from the edge: chord 2 sqrt(d^2 - t^2)
  CHECK(arc_length_in_disc(outer, Disc{{0.5, 0.03}, 0.05}) == doctest::Approx(2 * 0.04));
  CHECK(arc_length_in_disc(outer, Disc{{0.5, 0.5}, 0.1}) == 0.0);
  // at a corner the disc sees two half chords
  CHECK(arc_length_in_disc(inner, Disc{{0.35, 0.35}, 0.05}) == doctest::Approx(0.1));
  CHECK_THROWS_AS(boundary(Region::disc({{0, 0}, 1}), BoundarySide::Inner), InvalidArgument);
}

TEST_CASE("midpoint quadrature converges as h halves") {
  // smooth integrand on a rectangle: second-order convergence
  const Region box = Region::rect({0, 0, 1, 0.7});
  auto f = [](Point p) { return std::exp(p.x) * std::cos(2 * p.y); };
  const double exact = (std::exp(1.0) - 1.0) * std::sin(1.4) / 2.0;
  double prev = std::abs(integrate(f, box, QuadratureSpec(0.1)) - exact);
  for (double h : {0.05, 0.025, 0.0125, 0.00625}) {
    const double err = std::abs(integrate(f, box, QuadratureSpec(h)) - exact);
    CHECK(prev / err >= 1.5);
    prev = err;
  }
  // half disc: cell-centre counting on a curved boundary
  const double R = 0.1;
  const Region half = intersect(Region::disc({{0.5, 0.5}, R}), Region::rect({0.5, 0, 1, 1}));
  const double target = kPi * R * R / 2;
  double prev_err = std::abs(measure(half, QuadratureSpec(R / 25)) - target);
  for (double n : {50.0, 100.0, 200.0, 400.0}) {
    const double err = std::abs(measure(half, QuadratureSpec(R / n)) - target);
    CHECK(prev_err / err >= 1.5);
    prev_err = err;
  }
}

TEST_CASE("integrating over an unbounded region is rejected") {
  const Region plane = Region::rect({-INFINITY, -INFINITY, INFINITY, INFINITY});
  CHECK_THROWS_AS(measure(plane, QuadratureSpec(0.1)), InvalidArgument);
}
