#pragma once

// Cell masses for given dual weights and a concave-maximization solver for
// the weights realizing prescribed target masses. The discretized dual is
//   F(b) = sum_i lambda_i b_i - sum_z w(z) max_i phi_i(z),
// whose supergradient component is lambda_i - mass_i(b). Plain gradient
// ascent with a backtracking line search is enough at desk scale and is
// robust for every p >= 1; the gauge b_0 = 0 is restored after each step.

#include <span>
#include <stdexcept>
#include <vector>

#include "ottess/geometry.hpp"
#include "ottess/grid.hpp"
#include "ottess/potential.hpp"

namespace ottess {

struct SolveReport {
  std::vector<double> weights;
  double residual = 0.0;  // max_i |mass_i - lambda_i|
  int iterations = 0;
  std::vector<double> objective_trace;  // dual objective after each accepted step
  bool converged = false;
};

namespace detail {

inline std::vector<Assignment> assign_all(const Grid& grid, std::span<const Site> sites,
                                          CostExponent p, const Domain& domain) {
  std::vector<Assignment> out;
  out.reserve(grid.size());
  for (std::size_t z = 0; z < grid.size(); ++z)
    out.push_back(assign(sites, grid.points[z], p, domain, 0.0));
  return out;
}

inline std::vector<double> masses_of(const Grid& grid, const std::vector<Assignment>& a,
                                     std::size_t n_sites) {
  std::vector<KahanSum> acc(n_sites);
  for (std::size_t z = 0; z < grid.size(); ++z) acc[a[z].value].add(grid.weights[z]);
  std::vector<double> masses(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) masses[i] = acc[i].value();
  return masses;
}

// Transport costs c_p(x_i, z) tabulated once per solve; only the weights
// change between iterations.
struct CostTable {
  std::size_t n_sites = 0;
  std::vector<double> cost;  // node-major: cost[z * n_sites + i]

  CostTable(const Grid& grid, std::span<const Site> sites, CostExponent p,
            const Domain& domain)
      : n_sites(sites.size()), cost(grid.size() * sites.size()) {
    for (std::size_t z = 0; z < grid.size(); ++z)
      for (std::size_t i = 0; i < n_sites; ++i) {
        const double d = distance(domain, sites[i].position, grid.points[z]);
        cost[z * n_sites + i] = pow_dist(d, p.value()) / p.value();
      }
  }

  // One pass over the grid: masses under argmax assignment (lowest index on
  // exact ties, matching assign with tie_tol = 0) and the grid term of the
  // dual objective.
  void masses_and_potential_integral(const Grid& grid, std::span<const double> b,
                                     std::vector<double>& masses, double& integral) const {
    std::vector<KahanSum> acc(n_sites);
    KahanSum pot;
    for (std::size_t z = 0; z < grid.size(); ++z) {
      const double* c = cost.data() + z * n_sites;
      int best = 0;
      double best_value = b[0] - c[0];
      for (std::size_t i = 1; i < n_sites; ++i) {
        const double v = b[i] - c[i];
        if (v > best_value) {
          best_value = v;
          best = static_cast<int>(i);
        }
      }
      acc[best].add(grid.weights[z]);
      pot.add(grid.weights[z] * best_value);
    }
    masses.resize(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) masses[i] = acc[i].value();
    integral = pot.value();
  }
};

}  // namespace detail

/// mass_i = quadrature weight of the nodes assigned to site i (tie_tol = 0).
inline std::vector<double> cell_masses(const Grid& grid, std::span<const Site> sites,
                                       CostExponent p, const Domain& domain) {
  if (sites.empty()) throw std::invalid_argument("cell_masses: empty site list");
  return detail::masses_of(grid, detail::assign_all(grid, sites, p, domain), sites.size());
}

/// F(b) = sum_i lambda_i b_i - sum_z w(z) max_i phi_i(z); concave in b.
inline double dual_objective(const Grid& grid, std::span<const Site> sites, CostExponent p,
                             const Domain& domain) {
  if (sites.empty()) throw std::invalid_argument("dual_objective: empty site list");
  detail::KahanSum linear;
  for (const Site& s : sites) linear.add(s.target_mass * s.weight);
  detail::KahanSum pot;
  for (std::size_t z = 0; z < grid.size(); ++z) {
    double best = phi(sites[0], grid.points[z], p, domain);
    for (std::size_t i = 1; i < sites.size(); ++i)
      best = std::max(best, phi(sites[i], grid.points[z], p, domain));
    pot.add(grid.weights[z] * best);
  }
  return linear.value() - pot.value();
}

/// Gradient ascent on the dual with backtracking line search. Initial weights
/// are taken from the sites (gauge-shifted so b_0 = 0); the initial step is
/// 1/(max node weight density), halved once more for p = 1 where the dual is
/// only weakly concave. Terminates when max_i |mass_i - lambda_i| <= tol.
inline SolveReport solve_weights(const Grid& grid, std::span<const Site> sites, CostExponent p,
                                 const Domain& domain, double tol, int max_iter) {
  if (sites.empty()) throw std::invalid_argument("solve_weights: empty site list");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_weights: tol must be > 0");

  double lambda_sum = 0.0;
  for (const Site& s : sites) {
    if (!(s.target_mass > 0.0))
      throw std::invalid_argument("solve_weights: every target mass must be > 0");
    if (!contains(domain, s.position))
      throw std::invalid_argument("solve_weights: site position outside the domain");
    lambda_sum += s.target_mass;
  }
  if (std::abs(lambda_sum - 1.0) > 1e-9)
    throw std::invalid_argument("solve_weights: target masses must sum to 1");

  const std::size_t n = sites.size();
  const detail::CostTable table(grid, sites, p, domain);

  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = sites[i].weight;
  const double gauge = b[0];
  for (double& bi : b) bi -= gauge;

  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = sites[i].target_mass;

  auto objective_of = [&](std::span<const double> weights, std::vector<double>& masses) {
    double integral = 0.0;
    table.masses_and_potential_integral(grid, weights, masses, integral);
    detail::KahanSum linear;
    for (std::size_t i = 0; i < n; ++i) linear.add(lambda[i] * weights[i]);
    return linear.value() - integral;
  };

  SolveReport report;
  std::vector<double> masses;
  double objective = objective_of(b, masses);
  report.objective_trace.push_back(objective);

  auto residual_of = [&](const std::vector<double>& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(m[i] - lambda[i]));
    return r;
  };
  double residual = residual_of(masses);

  const double initial_step =
      (p.value() == 1.0 ? 0.5 : 1.0) / grid.max_weight_density;

  std::vector<double> candidate(n), candidate_masses;
  int iter = 0;
  while (residual > tol && iter < max_iter) {
    double step = initial_step;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t i = 0; i < n; ++i)
        candidate[i] = b[i] + step * (lambda[i] - masses[i]);
      const double g0 = candidate[0];
      for (double& ci : candidate) ci -= g0;  // gauge b_0 = 0
      const double cand_objective = objective_of(candidate, candidate_masses);
      if (cand_objective >= objective) {
        b = candidate;
        masses = candidate_masses;
        objective = cand_objective;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no non-decreasing step found: stalled
    ++iter;
    report.objective_trace.push_back(objective);
    residual = residual_of(masses);
  }

  report.weights = b;
  report.residual = residual;
  report.iterations = iter;
  report.converged = residual <= tol;
  return report;
}

}  // namespace ottess
