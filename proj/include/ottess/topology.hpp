#pragma once

// Grid-level verification of the geometric statements about cells: component
// counts via BFS on the grid adjacency, segment/geodesic containment checks
// with a 2h boundary slack, the sphere simple-connectedness proxy (cell and
// complement both connected), the circle and antipode facts for halfspaces on
// the sphere, and the tie-band estimate of the interface measure.

#include <cstdint>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ottess/geometry.hpp"
#include "ottess/grid.hpp"
#include "ottess/potential.hpp"
#include "ottess/solver.hpp"

namespace ottess {

struct Tessellation {
  const Grid* grid = nullptr;
  Domain domain = Domain::unit_sphere();
  std::vector<Site> sites;
  double p = 1.0;
  std::vector<Assignment> assignments;  // tie_tol = 0
  std::vector<double> masses;
  std::vector<char> boundary_band;  // top-two potential gap within the scaled tie band

  CostExponent exponent() const { return CostExponent(p); }
};

/// Tie-band width used for boundary-measure estimation: a Lipschitz bound
/// p * diam^(p-1) on the potential difference times two grid spacings.
inline double tie_band_threshold(const Grid& grid, CostExponent p, const Domain& domain) {
  return p.value() * std::pow(domain.diameter(), p.value() - 1.0) * 2.0 * grid.spacing;
}

inline Tessellation tessellate(const Grid& grid, std::span<const Site> sites, CostExponent p,
                               const Domain& domain) {
  if (sites.empty()) throw std::invalid_argument("tessellate: empty site list");
  Tessellation tess;
  tess.grid = &grid;
  tess.domain = domain;
  tess.sites.assign(sites.begin(), sites.end());
  tess.p = p.value();
  tess.assignments = detail::assign_all(grid, sites, p, domain);
  tess.masses = detail::masses_of(grid, tess.assignments, sites.size());

  tess.boundary_band.assign(grid.size(), 0);
  if (sites.size() > 1) {
    const double band = tie_band_threshold(grid, p, domain);
    for (std::size_t z = 0; z < grid.size(); ++z) {
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      for (const Site& s : sites) {
        const double v = phi(s, grid.points[z], p, domain);
        if (v > best) {
          second = best;
          best = v;
        } else if (v > second) {
          second = v;
        }
      }
      tess.boundary_band[z] = (best - second <= band) ? 1 : 0;
    }
  }
  return tess;
}

struct ComponentLabels {
  int count = 0;
  std::vector<int> labels;  // component id per node, -1 outside the selected set
};

namespace detail {

template <class Pred>
inline ComponentLabels label_nodes(const Grid& grid, Pred&& in_set) {
  ComponentLabels out;
  out.labels.assign(grid.size(), -1);
  std::queue<int> frontier;
  for (std::size_t start = 0; start < grid.size(); ++start) {
    if (!in_set(start) || out.labels[start] >= 0) continue;
    const int id = out.count++;
    out.labels[start] = id;
    frontier.push(static_cast<int>(start));
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : grid.neighbors(u)) {
        if (out.labels[v] >= 0 || !in_set(static_cast<std::size_t>(v))) continue;
        out.labels[v] = id;
        frontier.push(v);
      }
    }
  }
  return out;
}

}  // namespace detail

/// BFS component labeling of the nodes assigned to site_index.
/// count = 0 for an empty cell.
inline ComponentLabels label_components(const Tessellation& tess, int site_index) {
  if (site_index < 0 || site_index >= static_cast<int>(tess.sites.size()))
    throw std::invalid_argument("label_components: site index out of range");
  return detail::label_nodes(*tess.grid, [&](std::size_t z) {
    return tess.assignments[z].value == site_index;
  });
}

namespace detail {

// Containment with discretization slack: the probe point must lie in the
// domain and be assigned to the site, or lie within 2h of some grid node of
// the cell. The domain test matters: a segment can leave a non-convex polygon
// through a notch where no cell exists at all.
inline bool probe_in_cell(const Tessellation& tess, int site_index, const Point& q) {
  const CostExponent p = tess.exponent();
  if (contains(tess.domain, q) &&
      assign(tess.sites, q, p, tess.domain, 0.0).value == site_index)
    return true;
  const double slack = 2.0 * tess.grid->spacing;
  bool near_cell = false;
  for_nodes_near(*tess.grid, q, slack, [&](int id) {
    if (tess.assignments[id].value == site_index) near_cell = true;
  });
  return near_cell;
}

inline std::vector<int> cell_nodes(const Tessellation& tess, int site_index) {
  std::vector<int> nodes;
  for (std::size_t z = 0; z < tess.grid->size(); ++z)
    if (tess.assignments[z].value == site_index) nodes.push_back(static_cast<int>(z));
  return nodes;
}

}  // namespace detail

struct ConvexityResult {
  bool pass = false;
  bool empty_cell = false;
};

/// Samples random node pairs of the cell and walks the straight segment
/// between them; passes iff every probe stays in the cell up to 2h slack.
inline ConvexityResult check_convexity(const Tessellation& tess, int site_index, int n_pairs,
                                       std::uint64_t seed) {
  if (tess.domain.kind() != DomainKind::EuclideanPolygon)
    throw std::invalid_argument("check_convexity: planar domain required");
  const std::vector<int> nodes = detail::cell_nodes(tess, site_index);
  if (nodes.empty()) return {true, true};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  for (int pair = 0; pair < n_pairs; ++pair) {
    const Point& a = tess.grid->points[nodes[pick(rng)]];
    const Point& b = tess.grid->points[nodes[pick(rng)]];
    for (int j = 0; j < 16; ++j) {
      const double t = static_cast<double>(j) / 15.0;
      const Point q = geodesic_point(tess.domain, a, b, t);
      if (!detail::probe_in_cell(tess, site_index, q)) return {false, false};
    }
  }
  return {true, false};
}

struct StarlikeResult {
  bool pass = false;
  bool empty_cell = false;
  bool fixed_point_violation = false;  // nearest node to x_i assigned elsewhere
};

/// Walks the minimizing geodesic from the site to sampled cell nodes; passes
/// iff every walked point stays in the cell up to 2h slack. Fails outright
/// when the node nearest to x_i is not assigned to i.
inline StarlikeResult check_starlike(const Tessellation& tess, int site_index, int n_samples,
                                     std::uint64_t seed) {
  if (site_index < 0 || site_index >= static_cast<int>(tess.sites.size()))
    throw std::invalid_argument("check_starlike: site index out of range");
  const std::vector<int> nodes = detail::cell_nodes(tess, site_index);
  if (nodes.empty()) return {true, true, false};

  const Point& center = tess.sites[site_index].position;
  if (tess.assignments[nearest_node(*tess.grid, center)].value != site_index)
    return {false, false, true};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  const bool on_sphere = tess.domain.kind() == DomainKind::UnitSphere;
  for (int k = 0; k < n_samples; ++k) {
    const Point& w = tess.grid->points[nodes[pick(rng)]];
    if (on_sphere && distance(tess.domain, center, w) > kPi - 1e-6)
      continue;  // antipodal target: geodesic not unique
    for (int j = 0; j < 32; ++j) {
      const double t = static_cast<double>(j) / 31.0;
      const Point q = geodesic_point(tess.domain, center, w, t);
      if (!detail::probe_in_cell(tess, site_index, q)) return {false, false, false};
    }
  }
  return {true, false, false};
}

struct SphereConnectivity {
  int components = 0;
  int complement_components = 0;
};

/// Per-site component counts of the cell and of its complement node set. On
/// S^2 an open connected set with connected complement is simply connected,
/// so (1, 1) for every nonempty cell is the pass condition when at least two
/// cells are nonempty.
inline std::vector<SphereConnectivity> check_sphere_connectedness(const Tessellation& tess) {
  if (tess.domain.kind() != DomainKind::UnitSphere)
    throw std::invalid_argument("check_sphere_connectedness: sphere domain required");
  std::vector<SphereConnectivity> out(tess.sites.size());
  for (int i = 0; i < static_cast<int>(tess.sites.size()); ++i) {
    out[i].components = label_components(tess, i).count;
    out[i].complement_components =
        detail::label_nodes(*tess.grid, [&](std::size_t z) {
          return tess.assignments[z].value != i;
        }).count;
  }
  return out;
}

struct CircleSpec {
  Point center;    // q on the sphere
  double radius;   // r in (0, pi), bounded away from the ends
  int n_samples = 720;
};

/// Samples the circle C = boundary of B(q, r) and checks that membership in
/// H^i_j forms at most one cyclic run (0 or 2 transitions). A failure is
/// resampled once at 4x resolution before being reported.
inline bool check_circle_lemma(std::span<const Site> sites, std::size_t i, std::size_t j,
                               const CircleSpec& circle, CostExponent p, const Domain& domain) {
  if (domain.kind() != DomainKind::UnitSphere)
    throw std::invalid_argument("check_circle_lemma: sphere domain required");
  if (i == j) throw std::invalid_argument("check_circle_lemma: i and j must differ");
  if (!(circle.radius >= 1e-6 && circle.radius <= kPi - 1e-6))
    throw std::invalid_argument("check_circle_lemma: radius out of (0, pi)");

  const Vec3 q = circle.center.xyz();
  const Vec3 a = std::abs(q.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  Vec3 e1 = cross(q, a);
  e1 = (1.0 / norm(e1)) * e1;
  const Vec3 e2 = cross(q, e1);

  auto transitions = [&](int n) {
    int flips = 0;
    bool first = false, prev = false;
    for (int k = 0; k < n; ++k) {
      const double ang = 2.0 * kPi * k / n;
      const Vec3 v = std::cos(circle.radius) * q +
                     std::sin(circle.radius) * (std::cos(ang) * e1 + std::sin(ang) * e2);
      const bool member = in_halfspace(sites, i, j, Point::sphere(v), p, domain);
      if (k == 0)
        first = member;
      else if (member != prev)
        ++flips;
      prev = member;
    }
    if (prev != first) ++flips;
    return flips;
  };

  if (transitions(circle.n_samples) <= 2) return true;
  return transitions(4 * circle.n_samples) <= 2;
}

/// If the antipode of x_i lies in H^i_j then H^i_j must be the whole sphere:
/// vacuously true when the premise fails, otherwise every grid node must
/// satisfy phi_i > phi_j (gaps within 1e-12 tolerated as ties).
inline bool check_antipode_lemma(std::span<const Site> sites, std::size_t i, std::size_t j,
                                 const Grid& grid, CostExponent p, const Domain& domain) {
  if (domain.kind() != DomainKind::UnitSphere)
    throw std::invalid_argument("check_antipode_lemma: sphere domain required");
  if (i == j) throw std::invalid_argument("check_antipode_lemma: i and j must differ");

  const Point anti = antipode(domain, sites[i].position);
  if (!in_halfspace(sites, i, j, anti, p, domain)) return true;  // premise false

  for (std::size_t z = 0; z < grid.size(); ++z) {
    const double vi = phi(sites[i], grid.points[z], p, domain);
    const double vj = phi(sites[j], grid.points[z], p, domain);
    if (!(vi > vj) && std::abs(vi - vj) > 1e-12) return false;
  }
  return true;
}

/// Total quadrature weight of the nodes whose top-two potentials are within
/// the Lipschitz-scaled tie band: a stand-in for the interface measure that
/// shrinks like O(h) under refinement.
inline double boundary_measure_estimate(const Grid& grid, std::span<const Site> sites,
                                        CostExponent p, const Domain& domain) {
  if (sites.size() < 2) return 0.0;
  const double band = tie_band_threshold(grid, p, domain);
  detail::KahanSum mass;
  for (std::size_t z = 0; z < grid.size(); ++z) {
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    for (const Site& s : sites) {
      const double v = phi(s, grid.points[z], p, domain);
      if (v > best) {
        second = best;
        best = v;
      } else if (v > second) {
        second = v;
      }
    }
    if (best - second <= band) mass.add(grid.weights[z]);
  }
  return mass.value();
}

}  // namespace ottess
