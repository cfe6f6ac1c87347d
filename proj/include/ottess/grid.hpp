#pragma once

// Quadrature grids approximating the normalized volume measure. Polygons get
// a uniform square lattice clipped by membership (indicator midpoint rule);
// the sphere gets a latitude-longitude lattice at cell centers with
// cos(latitude) weights. Both carry a symmetric 4-neighbor adjacency used for
// component labeling; the sphere adds longitude wraparound and virtual pole
// links so polar caps are connected.

#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ottess/geometry.hpp"

namespace ottess {

struct Grid {
  DomainKind kind = DomainKind::EuclideanPolygon;
  std::vector<Point> points;
  std::vector<double> weights;  // quadrature weights, sum to 1

  // adjacency in CSR form
  std::vector<int> adj_offsets;
  std::vector<int> adj;

  double spacing = 0.0;             // characteristic spacing h
  double max_weight_density = 0.0;  // max_i weight_i / geometric cell measure

  // planar lattice metadata (node_of is -1 where the lattice point was dropped)
  int nx = 0, ny = 0;
  Vec2 origin{};
  std::vector<int> lattice_to_node;

  // sphere lattice metadata
  int n_lat = 0, n_lon = 0;

  std::size_t size() const { return points.size(); }

  std::span<const int> neighbors(int i) const {
    return {adj.data() + adj_offsets[i],
            static_cast<std::size_t>(adj_offsets[i + 1] - adj_offsets[i])};
  }

  int node_at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return -1;
    return lattice_to_node[static_cast<std::size_t>(iy) * nx + ix];
  }

  int sphere_node(int k, int l) const {
    const int lw = ((l % n_lon) + n_lon) % n_lon;
    if (k < 0 || k >= n_lat) return -1;
    return k * n_lon + lw;
  }
};

namespace detail {

inline std::pair<std::vector<int>, std::vector<int>> build_csr(
    std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> degree(n, 0);
  for (const auto& [u, v] : edges) {
    ++degree[u];
    ++degree[v];
  }
  std::vector<int> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + degree[i];
  std::vector<int> adj(offsets[n]);
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    adj[cursor[u]++] = v;
    adj[cursor[v]++] = u;
  }
  return {std::move(offsets), std::move(adj)};
}

// Compensated (Kahan) accumulator: order-independent-looking sums in tests
// rely on the fixed iteration order plus this to stay within 1e-12 of 1.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace detail

/// Uniform lattice grid over the polygon's bounding box, step
/// h = (max bbox side)/resolution, keeping lattice points inside the polygon.
inline Grid build_polygon_grid(const Domain& domain, int resolution) {
  if (domain.kind() != DomainKind::EuclideanPolygon)
    throw std::invalid_argument("build_polygon_grid: polygon domain required");
  if (resolution < 8)
    throw std::invalid_argument("build_polygon_grid: resolution must be >= 8");

  const auto [lo, hi] = domain.bounding_box();
  const double w = hi.x - lo.x;
  const double ht = hi.y - lo.y;
  const double h = std::max(w, ht) / resolution;

  Grid grid;
  grid.kind = DomainKind::EuclideanPolygon;
  grid.spacing = h;
  grid.origin = lo;
  grid.nx = static_cast<int>(std::floor(w / h + 1e-9)) + 1;
  grid.ny = static_cast<int>(std::floor(ht / h + 1e-9)) + 1;
  grid.lattice_to_node.assign(static_cast<std::size_t>(grid.nx) * grid.ny, -1);

  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Point q = Point::planar(lo.x + ix * h, lo.y + iy * h);
      if (!contains(domain, q)) continue;
      grid.lattice_to_node[static_cast<std::size_t>(iy) * grid.nx + ix] =
          static_cast<int>(grid.points.size());
      grid.points.push_back(q);
    }
  }
  if (grid.points.empty())
    throw std::invalid_argument("build_polygon_grid: no lattice node lies inside the polygon");

  const double wnode = 1.0 / static_cast<double>(grid.points.size());
  grid.weights.assign(grid.points.size(), wnode);
  grid.max_weight_density = wnode / (h * h);

  std::vector<std::pair<int, int>> edges;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int u = grid.node_at(ix, iy);
      if (u < 0) continue;
      const int right = grid.node_at(ix + 1, iy);
      const int up = grid.node_at(ix, iy + 1);
      if (right >= 0) edges.emplace_back(u, right);
      if (up >= 0) edges.emplace_back(u, up);
    }
  }
  std::tie(grid.adj_offsets, grid.adj) = detail::build_csr(grid.points.size(), edges);
  return grid;
}

/// Latitude-longitude grid at cell centers with cos(latitude) weights,
/// longitude wraparound, and a virtual pole link joining each node of the top
/// (resp. bottom) row to the node at the antipodal longitude.
inline Grid build_sphere_grid(int n_lat, int n_lon) {
  if (n_lat < 8) throw std::invalid_argument("build_sphere_grid: n_lat must be >= 8");
  if (n_lon < 16) throw std::invalid_argument("build_sphere_grid: n_lon must be >= 16");

  const double dlat = kPi / n_lat;
  const double dlon = 2.0 * kPi / n_lon;

  Grid grid;
  grid.kind = DomainKind::UnitSphere;
  grid.n_lat = n_lat;
  grid.n_lon = n_lon;
  grid.spacing = std::max(dlat, dlon);

  double total = 0.0;
  std::vector<double> row_weight(n_lat);
  for (int k = 0; k < n_lat; ++k) {
    const double lat = -kPi / 2.0 + (k + 0.5) * dlat;
    row_weight[k] = std::cos(lat);
    total += row_weight[k] * n_lon;
  }

  grid.points.reserve(static_cast<std::size_t>(n_lat) * n_lon);
  grid.weights.reserve(grid.points.capacity());
  for (int k = 0; k < n_lat; ++k) {
    const double lat = -kPi / 2.0 + (k + 0.5) * dlat;
    for (int l = 0; l < n_lon; ++l) {
      const double lon = (l + 0.5) * dlon;
      grid.points.push_back(Point::sphere(std::cos(lat) * std::cos(lon),
                                          std::cos(lat) * std::sin(lon), std::sin(lat)));
      grid.weights.push_back(row_weight[k] / total);
    }
  }
  grid.max_weight_density = 1.0 / (total * dlat * dlon);

  std::vector<std::pair<int, int>> edges;
  for (int k = 0; k < n_lat; ++k) {
    for (int l = 0; l < n_lon; ++l) {
      const int u = grid.sphere_node(k, l);
      edges.emplace_back(u, grid.sphere_node(k, l + 1));
      if (k + 1 < n_lat) edges.emplace_back(u, grid.sphere_node(k + 1, l));
    }
  }
  // virtual pole links (added once per node pair)
  for (int k : {0, n_lat - 1}) {
    for (int l = 0; l < n_lon; ++l) {
      const int partner = (l + n_lon / 2) % n_lon;
      if (l < partner) edges.emplace_back(grid.sphere_node(k, l), grid.sphere_node(k, partner));
    }
  }
  std::tie(grid.adj_offsets, grid.adj) = detail::build_csr(grid.points.size(), edges);
  return grid;
}

/// Visit the ids of grid nodes within (Euclidean/angular) radius of q.
/// The lattice metadata makes this a small local block scan.
template <class F>
inline void for_nodes_near(const Grid& grid, const Point& q, double radius, F&& visit) {
  if (grid.kind == DomainKind::EuclideanPolygon) {
    const double h = grid.spacing;
    const int cx = static_cast<int>(std::round((q.x() - grid.origin.x) / h));
    const int cy = static_cast<int>(std::round((q.y() - grid.origin.y) / h));
    const int r = static_cast<int>(std::ceil(radius / h)) + 1;
    for (int iy = cy - r; iy <= cy + r; ++iy) {
      for (int ix = cx - r; ix <= cx + r; ++ix) {
        const int id = grid.node_at(ix, iy);
        if (id < 0) continue;
        if (norm(grid.points[id].xy() - q.xy()) <= radius) visit(id);
      }
    }
    return;
  }
  const double dlat = kPi / grid.n_lat;
  const double dlon = 2.0 * kPi / grid.n_lon;
  const double lat = std::asin(std::clamp(q.z(), -1.0, 1.0));
  const double lon = std::atan2(q.y(), q.x());
  const int ck = static_cast<int>(std::floor((lat + kPi / 2.0) / dlat));
  const int cl = static_cast<int>(std::floor((lon < 0 ? lon + 2.0 * kPi : lon) / dlon));
  const int rk = static_cast<int>(std::ceil(radius / dlat)) + 1;
  const Domain sphere = Domain::unit_sphere();
  for (int k = std::max(0, ck - rk); k <= std::min(grid.n_lat - 1, ck + rk); ++k) {
    const double row_lat = -kPi / 2.0 + (k + 0.5) * dlat;
    const double cosrow = std::cos(row_lat);
    int rl;
    if (cosrow * kPi <= radius + dlon)
      rl = grid.n_lon;  // near a pole: whole row
    else
      rl = static_cast<int>(std::ceil(radius / (dlon * cosrow))) + 1;
    const int lo_l = (2 * rl + 1 >= grid.n_lon) ? 0 : cl - rl;
    const int hi_l = (2 * rl + 1 >= grid.n_lon) ? grid.n_lon - 1 : cl + rl;
    for (int l = lo_l; l <= hi_l; ++l) {
      const int id = grid.sphere_node(k, l);
      if (id < 0) continue;
      if (distance(sphere, grid.points[id], q) <= radius) visit(id);
    }
  }
}

/// Nearest grid node to q (expanding-ring search over the lattice).
inline int nearest_node(const Grid& grid, const Point& q) {
  double radius = 2.0 * grid.spacing;
  const Domain sphere = Domain::unit_sphere();
  for (int attempt = 0; attempt < 64; ++attempt) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for_nodes_near(grid, q, radius, [&](int id) {
      const double d = grid.kind == DomainKind::EuclideanPolygon
                           ? norm(grid.points[id].xy() - q.xy())
                           : distance(sphere, grid.points[id], q);
      if (d < best_d) {
        best_d = d;
        best = id;
      }
    });
    if (best >= 0) return best;
    radius *= 2.0;
  }
  throw std::runtime_error("nearest_node: no grid node found");
}

/// CSV dump: "x,y,weight" per node (planar) or "x,y,z,weight" (sphere).
inline void write_grid_csv(const Grid& grid, std::ostream& out) {
  if (grid.kind == DomainKind::EuclideanPolygon) {
    out << "x,y,weight\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << grid.points[i].x() << ',' << grid.points[i].y() << ',' << grid.weights[i] << '\n';
  } else {
    out << "x,y,z,weight\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << grid.points[i].x() << ',' << grid.points[i].y() << ',' << grid.points[i].z() << ','
          << grid.weights[i] << '\n';
  }
}

}  // namespace ottess
