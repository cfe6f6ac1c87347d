#include <catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "ottess/potential.hpp"

using namespace ottess;

namespace {

const Domain kSquare = Domain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
const Domain kSphere = Domain::unit_sphere();

}  // namespace

TEST_CASE("phi evaluates -d^p/p + b") {
  const Site at_z{Point::planar(0.25, 0.25), 0.0, 3.0};
  CHECK(phi(at_z, Point::planar(0.25, 0.25), CostExponent(1.7), kSquare) == 3.0);

  const Domain wide = Domain::polygon({{-2, -2}, {2, -2}, {2, 2}, {-2, 2}});
  const Site s{Point::planar(1, 0), 0.0, 0.0};
  CHECK(phi(s, Point::planar(0, 0), CostExponent(2.0), wide) == Catch::Approx(-0.5));

  const Site north{Point::sphere(0, 0, 1), 0.0, 0.0};
  CHECK(phi(north, Point::sphere(0, 0, -1), CostExponent(1.0), kSphere) ==
        Catch::Approx(-kPi));
}

TEST_CASE("cost exponent validation") {
  CHECK_THROWS_AS(CostExponent(0.5), std::invalid_argument);
  CHECK_NOTHROW(CostExponent(1.0));
}

TEST_CASE("assign picks the strict argmax with lowest-index ties") {
  const std::vector<Site> sites{{Point::planar(0.25, 0.5), 0.5, 0.0},
                                {Point::planar(0.75, 0.5), 0.5, 0.0}};
  const CostExponent p(2.0);
  const Point tie = Point::planar(0.5, 0.5);
  CHECK(assign(sites, tie, p, kSquare, 0.0).value == 0);
  CHECK(assign(sites, Point::planar(0.7, 0.5), p, kSquare, 0.0).value == 1);
  CHECK(assign(sites, tie, p, kSquare, 1e-9).is_boundary());

  CHECK_THROWS_AS(assign(std::vector<Site>{}, tie, p, kSquare, 0.0), std::invalid_argument);
}

TEST_CASE("in_halfspace is strict") {
  const std::vector<Site> sites{{Point::planar(0.25, 0.5), 0.5, 0.0},
                                {Point::planar(0.75, 0.5), 0.5, 0.0}};
  const CostExponent p(2.0);
  CHECK(in_halfspace(sites, 0, 1, Point::planar(0.3, 0.5), p, kSquare));
  CHECK_FALSE(in_halfspace(sites, 0, 1, Point::planar(0.5, 0.5), p, kSquare));
  CHECK_FALSE(in_halfspace(sites, 1, 0, Point::planar(0.5, 0.5), p, kSquare));
  CHECK_THROWS_AS(in_halfspace(sites, 1, 1, Point::planar(0.5, 0.5), p, kSquare),
                  std::invalid_argument);
}

TEST_CASE("a weight advantage exceeding the cost range dominates everywhere") {
  // brute force over a 100x100 lattice: with b_i = b_j + 10 and max cost
  // diff diam^p/p = 2^2/2 = 2 < 10 the halfspace covers the whole square
  const std::vector<Site> sites{{Point::planar(0.9, 0.9), 0.5, 10.0},
                                {Point::planar(0.1, 0.1), 0.5, 0.0}};
  const CostExponent p(2.0);
  for (int iy = 0; iy < 100; ++iy)
    for (int ix = 0; ix < 100; ++ix) {
      const Point z = Point::planar(ix / 99.0, iy / 99.0);
      REQUIRE(in_halfspace(sites, 0, 1, z, p, kSquare));
    }
}

TEST_CASE("assignment is invariant under a common weight shift") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> weight(-0.3, 0.3);
  for (double pval : {1.0, 1.5, 2.0, 3.0}) {
    const CostExponent p(pval);
    std::vector<Site> sites, shifted;
    for (int i = 0; i < 5; ++i) {
      const Site s{Point::planar(coord(rng), coord(rng)), 0.2, weight(rng)};
      sites.push_back(s);
      shifted.push_back(Site{s.position, s.target_mass, s.weight + 17.25});
    }
    for (int k = 0; k < 400; ++k) {
      const Point z = Point::planar(coord(rng), coord(rng));
      CHECK(assign(sites, z, p, kSquare, 0.0).value ==
            assign(shifted, z, p, kSquare, 0.0).value);
    }
  }
}

TEST_CASE("assign is consistent with in_halfspace") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  const CostExponent p(1.5);
  std::vector<Site> sites;
  for (int i = 0; i < 4; ++i)
    sites.push_back(Site{Point::planar(coord(rng), coord(rng)), 0.25, 0.1 * i});
  for (int k = 0; k < 500; ++k) {
    const Point z = Point::planar(coord(rng), coord(rng));
    const int winner = assign(sites, z, p, kSquare, 0.0).value;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (static_cast<int>(j) == winner) continue;
      const double vi = phi(sites[winner], z, p, kSquare);
      const double vj = phi(sites[j], z, p, kSquare);
      const bool tie = vi == vj;
      CHECK((in_halfspace(sites, winner, j, z, p, kSquare) || tie));
    }
  }
}

TEST_CASE("p=1 domination at the site empties the cell") {
  // triangle inequality: if phi_j(x_i) > phi_i(x_i) at p = 1, site j beats
  // site i everywhere
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  const CostExponent p(1.0);
  int premise_hits = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<Site> sites{
        {Point::planar(coord(rng), coord(rng)), 0.5, coord(rng)},
        {Point::planar(coord(rng), coord(rng)), 0.5, coord(rng) + 0.5}};
    if (!(phi(sites[1], sites[0].position, p, kSquare) >
          phi(sites[0], sites[0].position, p, kSquare)))
      continue;
    ++premise_hits;
    for (int k = 0; k < 200; ++k) {
      const Point z = Point::planar(coord(rng), coord(rng));
      REQUIRE(in_halfspace(sites, 1, 0, z, p, kSquare));
    }
  }
  CHECK(premise_hits > 0);
}
