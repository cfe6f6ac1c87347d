#include <catch_amalgamated.hpp>

#include <random>

#include "ottess/solver.hpp"

using namespace ottess;

namespace {

const Domain kSquare = Domain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});

std::vector<Site> two_symmetric_sites(double w0 = 0.0, double w1 = 0.0) {
  return {{Point::planar(0.25, 0.5), 0.5, w0}, {Point::planar(0.75, 0.5), 0.5, w1}};
}

}  // namespace

TEST_CASE("cell masses of symmetric, single and dominated sites") {
  const Grid grid = build_polygon_grid(kSquare, 64);
  const CostExponent p(2.0);

  const std::vector<double> sym = cell_masses(grid, two_symmetric_sites(), p, kSquare);
  CHECK(std::abs(sym[0] - 0.5) <= 2.0 * grid.spacing);
  CHECK(std::abs(sym[1] - 0.5) <= 2.0 * grid.spacing);
  CHECK(sym[0] + sym[1] == Catch::Approx(1.0).margin(1e-12));

  const std::vector<Site> one{{Point::planar(0.5, 0.5), 1.0, 0.0}};
  CHECK(cell_masses(grid, one, p, kSquare)[0] == Catch::Approx(1.0).margin(1e-12));

  const std::vector<Site> dominated{{Point::planar(0.25, 0.5), 0.5, 0.0},
                                    {Point::planar(0.75, 0.5), 0.5, -1e6}};
  CHECK(cell_masses(grid, dominated, p, kSquare)[1] == 0.0);
}

TEST_CASE("dual objective equals its quadrature definition") {
  const Grid grid = build_polygon_grid(kSquare, 48);
  const CostExponent p(2.0);
  const Point center = Point::planar(0.3, 0.6);
  const std::vector<Site> one{{center, 1.0, 0.0}};

  // independent quadrature of -(1/2) d^2 averaged over the grid
  double expected = 0.0;
  for (std::size_t z = 0; z < grid.size(); ++z) {
    const double dx = grid.points[z].x() - center.x();
    const double dy = grid.points[z].y() - center.y();
    expected += grid.weights[z] * (-0.5 * (dx * dx + dy * dy));
  }
  CHECK(dual_objective(grid, one, p, kSquare) == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("dual objective is gauge invariant and symmetric-site value matches") {
  const Grid grid = build_polygon_grid(kSquare, 48);
  const CostExponent p(2.0);

  const std::vector<Site> base = two_symmetric_sites();
  const std::vector<Site> shifted = two_symmetric_sites(7.5, 7.5);
  CHECK(dual_objective(grid, base, p, kSquare) ==
        Catch::Approx(dual_objective(grid, shifted, p, kSquare)).margin(1e-9));

  // with all weights zero the linear term vanishes
  double phimax_avg = 0.0;
  for (std::size_t z = 0; z < grid.size(); ++z)
    phimax_avg += grid.weights[z] *
                  std::max(phi(base[0], grid.points[z], p, kSquare),
                           phi(base[1], grid.points[z], p, kSquare));
  CHECK(dual_objective(grid, base, p, kSquare) == Catch::Approx(-phimax_avg).margin(1e-12));
}

TEST_CASE("solve_weights: symmetry, convergence, trivial cases") {
  const CostExponent p(2.0);

  SECTION("symmetric targets force equal weights") {
    // odd resolution keeps the bisector off the lattice columns; a column of
    // exact ties would pin the residual at half a column of mass
    const Grid grid = build_polygon_grid(kSquare, 65);
    const SolveReport report =
        solve_weights(grid, two_symmetric_sites(), p, kSquare, 1e-4, 400);
    CHECK(report.converged);
    CHECK(std::abs(report.weights[1] - report.weights[0]) <= 10.0 * 1e-4);
    CHECK(report.weights[0] == 0.0);  // gauge
  }

  SECTION("single site converges immediately") {
    const Grid grid = build_polygon_grid(kSquare, 64);
    const std::vector<Site> one{{Point::planar(0.5, 0.5), 1.0, 0.0}};
    const SolveReport report = solve_weights(grid, one, p, kSquare, 1e-6, 100);
    CHECK(report.converged);
    CHECK(report.iterations == 0);
    CHECK(report.residual <= 1e-12);
  }

  SECTION("asymmetric targets verified on a 4x finer grid") {
    // oblique site pair: a lattice-aligned interface quantizes the mass by
    // whole columns and makes tight tolerances unreachable
    const Grid grid = build_polygon_grid(kSquare, 96);
    std::vector<Site> sites{{Point::planar(0.28, 0.35), 0.7, 0.0},
                            {Point::planar(0.74, 0.68), 0.3, 0.0}};
    const SolveReport report = solve_weights(grid, sites, p, kSquare, 1e-3, 600);
    REQUIRE(report.converged);
    for (std::size_t i = 0; i < sites.size(); ++i) sites[i].weight = report.weights[i];
    const Grid fine = build_polygon_grid(kSquare, 384);
    const std::vector<double> masses = cell_masses(fine, sites, p, kSquare);
    CHECK(std::abs(masses[0] - 0.7) <= 3e-3);
    CHECK(std::abs(masses[1] - 0.3) <= 3e-3);
  }
}

TEST_CASE("solver input validation") {
  const Grid grid = build_polygon_grid(kSquare, 16);
  const CostExponent p(2.0);
  std::vector<Site> bad_sum{{Point::planar(0.25, 0.5), 0.5, 0.0},
                            {Point::planar(0.75, 0.5), 0.6, 0.0}};
  CHECK_THROWS_AS(solve_weights(grid, bad_sum, p, kSquare, 1e-3, 10), std::invalid_argument);

  std::vector<Site> outside{{Point::planar(0.25, 0.5), 0.5, 0.0},
                            {Point::planar(3.0, 0.5), 0.5, 0.0}};
  CHECK_THROWS_AS(solve_weights(grid, outside, p, kSquare, 1e-3, 10), std::invalid_argument);

  std::vector<Site> zero_mass{{Point::planar(0.25, 0.5), 1.0, 0.0},
                              {Point::planar(0.75, 0.5), 0.0, 0.0}};
  CHECK_THROWS_AS(solve_weights(grid, zero_mass, p, kSquare, 1e-3, 10), std::invalid_argument);
}

TEST_CASE("objective trace is non-decreasing across p") {
  const Grid grid = build_polygon_grid(kSquare, 48);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(0.1, 0.9);

  for (double pval : {1.0, 1.5, 2.0, 3.0}) {
    std::vector<Site> sites;
    double total = 0.0;
    std::vector<double> raw{0.4, 0.25, 0.2, 0.15};
    for (int i = 0; i < 4; ++i) {
      sites.push_back(Site{Point::planar(coord(rng), coord(rng)), raw[i], 0.0});
      total += raw[i];
    }
    for (Site& s : sites) s.target_mass /= total;
    const SolveReport report =
        solve_weights(grid, sites, CostExponent(pval), kSquare, 2e-3, 800);
    for (std::size_t k = 1; k < report.objective_trace.size(); ++k)
      REQUIRE(report.objective_trace[k] >= report.objective_trace[k - 1]);
    CHECK(report.converged);
  }
}

TEST_CASE("supergradient matches central differences of the dual") {
  const Grid grid = build_polygon_grid(kSquare, 64);
  const CostExponent p(1.5);
  std::vector<Site> sites{{Point::planar(0.3, 0.4), 0.6, 0.0},
                          {Point::planar(0.7, 0.6), 0.4, 0.0}};
  const SolveReport report = solve_weights(grid, sites, p, kSquare, 5e-3, 400);
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i].weight = report.weights[i];

  const std::vector<double> masses = cell_masses(grid, sites, p, kSquare);
  const double eps = 1e-7;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<Site> plus = sites, minus = sites;
    plus[i].weight += eps;
    minus[i].weight -= eps;
    const double fd = (dual_objective(grid, plus, p, kSquare) -
                       dual_objective(grid, minus, p, kSquare)) /
                      (2.0 * eps);
    CHECK(fd == Catch::Approx(sites[i].target_mass - masses[i]).margin(1e-6));
  }
}

TEST_CASE("solved assignments are gauge invariant") {
  const Grid grid = build_polygon_grid(kSquare, 48);
  const CostExponent p(2.0);
  auto solve_and_assign = [&](double initial) {
    std::vector<Site> sites{{Point::planar(0.3, 0.4), 0.6, initial},
                            {Point::planar(0.7, 0.6), 0.4, initial}};
    const SolveReport report = solve_weights(grid, sites, p, kSquare, 1e-3, 400);
    for (std::size_t i = 0; i < sites.size(); ++i) sites[i].weight = report.weights[i];
    std::vector<int> labels;
    for (std::size_t z = 0; z < grid.size(); ++z)
      labels.push_back(assign(sites, grid.points[z], p, kSquare, 0.0).value);
    return labels;
  };
  CHECK(solve_and_assign(0.0) == solve_and_assign(10.0));
}
