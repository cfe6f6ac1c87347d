#include <catch_amalgamated.hpp>

#include <random>

#include "ottess/geometry.hpp"

using namespace ottess;

namespace {

Domain unit_square() {
  return Domain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

Point random_sphere_point(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  return Point::sphere(gauss(rng), gauss(rng), gauss(rng));
}

}  // namespace

TEST_CASE("planar distance is Euclidean") {
  const Domain square = unit_square();
  const Domain big = Domain::polygon({{-10, -10}, {10, -10}, {10, 10}, {-10, 10}});
  CHECK(distance(big, Point::planar(0, 0), Point::planar(3, 4)) == Catch::Approx(5.0));
  CHECK(distance(square, Point::planar(0.2, 0.2), Point::planar(0.2, 0.2)) == 0.0);
}

TEST_CASE("sphere distance is the great-circle angle") {
  const Domain sphere = Domain::unit_sphere();
  const Point north = Point::sphere(0, 0, 1);
  const Point south = Point::sphere(0, 0, -1);
  CHECK(distance(sphere, north, south) == Catch::Approx(kPi));
  CHECK(distance(sphere, north, north) == 0.0);
  CHECK(distance(sphere, Point::sphere(1, 0, 0), Point::sphere(0, 1, 0)) ==
        Catch::Approx(kPi / 2.0));
}

TEST_CASE("distance rejects mismatched kinds") {
  const Domain sphere = Domain::unit_sphere();
  CHECK_THROWS_AS(distance(sphere, Point::planar(0, 0), Point::sphere(0, 0, 1)),
                  std::invalid_argument);
}

TEST_CASE("geodesic interpolation endpoints and midpoints") {
  const Domain plane = Domain::polygon({{-5, -5}, {5, -5}, {5, 5}, {-5, 5}});
  const Point mid = geodesic_point(plane, Point::planar(0, 0), Point::planar(2, 0), 0.5);
  CHECK(mid.x() == Catch::Approx(1.0));
  CHECK(mid.y() == Catch::Approx(0.0));

  const Domain sphere = Domain::unit_sphere();
  const Point a = Point::sphere(1, 0, 0);
  const Point b = Point::sphere(0, 1, 0);
  const Point at0 = geodesic_point(sphere, a, b, 0.0);
  CHECK(distance(sphere, at0, a) == Catch::Approx(0.0).margin(1e-12));

  // equator points 90 degrees apart: halfway is 45 degrees along the equator
  const Point half = geodesic_point(sphere, a, b, 0.5);
  CHECK(half.x() == Catch::Approx(std::sqrt(0.5)));
  CHECK(half.y() == Catch::Approx(std::sqrt(0.5)));
  CHECK(half.z() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("antipodal geodesics are rejected") {
  const Domain sphere = Domain::unit_sphere();
  CHECK_THROWS_AS(
      geodesic_point(sphere, Point::sphere(0, 0, 1), Point::sphere(0, 0, -1), 0.5),
      NonUniqueGeodesic);
}

TEST_CASE("antipode negates and is an involution") {
  const Domain sphere = Domain::unit_sphere();
  const Point north = Point::sphere(0, 0, 1);
  const Point anti = antipode(sphere, north);
  CHECK(anti.z() == Catch::Approx(-1.0));
  const Point ex = antipode(sphere, Point::sphere(1, 0, 0));
  CHECK(ex.x() == Catch::Approx(-1.0));

  std::mt19937_64 rng(7);
  for (int k = 0; k < 100; ++k) {
    const Point q = random_sphere_point(rng);
    const Point back = antipode(sphere, antipode(sphere, q));
    CHECK(back.x() == q.x());  // double negation is exact
    CHECK(back.y() == q.y());
    CHECK(back.z() == q.z());
    CHECK(distance(sphere, q, antipode(sphere, q)) == Catch::Approx(kPi));
  }

  CHECK_THROWS_AS(antipode(unit_square(), Point::planar(0.5, 0.5)), std::invalid_argument);
}

TEST_CASE("polygon membership with boundary counted inside") {
  const Domain square = unit_square();
  CHECK(contains(square, Point::planar(0.5, 0.5)));
  CHECK_FALSE(contains(square, Point::planar(2, 2)));
  CHECK(contains(square, Point::planar(0.0, 0.5)));  // on an edge
  CHECK(contains(square, Point::planar(1.0, 1.0)));  // on a vertex
  CHECK(contains(Domain::unit_sphere(), Point::sphere(0.3, -0.4, 0.86)));

  // L-shape: upper-right quadrant removed
  const Domain lshape =
      Domain::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  CHECK(contains(lshape, Point::planar(0.5, 1.5)));
  CHECK_FALSE(contains(lshape, Point::planar(1.5, 1.5)));
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
  // bowtie self-intersection
  CHECK_THROWS_AS(Domain::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), std::invalid_argument);
  // clockwise input is normalized to counterclockwise
  const Domain d = Domain::polygon({{0, 1}, {1, 1}, {1, 0}, {0, 0}});
  double area = 0.0;
  const auto& vs = d.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i)
    area += cross(vs[i], vs[(i + 1) % vs.size()]);
  CHECK(area > 0.0);
}

TEST_CASE("convexity predicate") {
  CHECK(unit_square().is_convex());
  const Domain lshape =
      Domain::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  CHECK_FALSE(lshape.is_convex());
}

TEST_CASE("metric properties on random triples") {
  std::mt19937_64 rng(42);
  const Domain sphere = Domain::unit_sphere();
  const Domain box = Domain::polygon({{-3, -3}, {3, -3}, {3, 3}, {-3, 3}});
  std::uniform_real_distribution<double> coord(-3.0, 3.0);

  for (int k = 0; k < 1000; ++k) {
    const Point a = Point::planar(coord(rng), coord(rng));
    const Point b = Point::planar(coord(rng), coord(rng));
    const Point c = Point::planar(coord(rng), coord(rng));
    CHECK(distance(box, a, c) <= distance(box, a, b) + distance(box, b, c) + 1e-10);
    CHECK(distance(box, a, b) == distance(box, b, a));

    const Point sa = random_sphere_point(rng);
    const Point sb = random_sphere_point(rng);
    const Point sc = random_sphere_point(rng);
    CHECK(distance(sphere, sa, sc) <=
          distance(sphere, sa, sb) + distance(sphere, sb, sc) + 1e-10);
    CHECK(distance(sphere, sa, sb) == distance(sphere, sb, sa));
  }
}

TEST_CASE("geodesic additivity") {
  std::mt19937_64 rng(99);
  const Domain sphere = Domain::unit_sphere();
  const Domain box = Domain::polygon({{-3, -3}, {3, -3}, {3, 3}, {-3, 3}});
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> param(0.0, 1.0);

  for (int k = 0; k < 200; ++k) {
    const double t = param(rng);
    const Point a = Point::planar(coord(rng), coord(rng));
    const Point b = Point::planar(coord(rng), coord(rng));
    const Point q = geodesic_point(box, a, b, t);
    CHECK(std::abs(distance(box, a, q) + distance(box, q, b) - distance(box, a, b)) <= 1e-9);
    CHECK(std::abs(distance(box, a, q) - t * distance(box, a, b)) <= 1e-10);

    const Point sa = random_sphere_point(rng);
    const Point sb = random_sphere_point(rng);
    if (distance(sphere, sa, sb) > kPi - 1e-3) continue;
    const Point sq = geodesic_point(sphere, sa, sb, t);
    CHECK(std::abs(distance(sphere, sa, sq) + distance(sphere, sq, sb) -
                   distance(sphere, sa, sb)) <= 1e-9);
    CHECK(std::abs(distance(sphere, sa, sq) - t * distance(sphere, sa, sb)) <= 1e-10);
  }
}
