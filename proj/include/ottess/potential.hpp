#pragma once

// Kantorovich potentials for the cost c_p(x,y) = d^p(x,y)/p. A site carries a
// target point x_i, the prescribed mass lambda_i and an additive dual weight
// b_i; the potential of a site is phi_i(z) = -d^p(x_i,z)/p + b_i, and the cell
// of site i is the set where phi_i strictly dominates all other potentials.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ottess/geometry.hpp"

namespace ottess {

/// Exponent p >= 1 of the transport cost d^p/p.
class CostExponent {
 public:
  explicit CostExponent(double p) : p_(p) {
    if (!(p >= 1.0) || !std::isfinite(p))
      throw std::invalid_argument("cost exponent must satisfy p >= 1");
  }
  double value() const { return p_; }

 private:
  double p_;
};

struct Site {
  Point position;
  double target_mass = 0.0;  // lambda_i
  double weight = 0.0;       // b_i
};

/// Result of assigning a point to a site: a site index, or the boundary
/// marker when the top two potentials tie within the requested tolerance.
struct Assignment {
  static constexpr int kBoundary = -1;
  int value = kBoundary;

  bool is_boundary() const { return value == kBoundary; }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// d^p with the d = 0 case short-circuited so fractional p never sees log(0).
inline double pow_dist(double d, double p) {
  if (d <= 0.0) return 0.0;
  return std::pow(d, p);
}

/// phi_i(z) = -d^p(x_i, z)/p + b_i.
inline double phi(const Site& site, const Point& z, CostExponent p, const Domain& domain) {
  const double d = distance(domain, site.position, z);
  return -pow_dist(d, p.value()) / p.value() + site.weight;
}

/// Argmax of phi_i(z) over the site list. Ties within tie_tol yield the
/// boundary marker when tie_tol > 0, and the smallest maximizing index when
/// tie_tol = 0. The scan order is fixed, so the result does not depend on
/// evaluation order.
inline Assignment assign(std::span<const Site> sites, const Point& z, CostExponent p,
                         const Domain& domain, double tie_tol) {
  if (sites.empty()) throw std::invalid_argument("assign: empty site list");
  if (tie_tol < 0.0) throw std::invalid_argument("assign: tie tolerance must be >= 0");

  int best = 0;
  double best_value = phi(sites[0], z, p, domain);
  double second_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sites.size(); ++i) {
    const double v = phi(sites[i], z, p, domain);
    if (v > best_value) {
      second_value = best_value;
      best_value = v;
      best = static_cast<int>(i);
    } else if (v > second_value) {
      second_value = v;
    }
  }
  if (tie_tol > 0.0 && sites.size() > 1 && best_value - second_value <= tie_tol)
    return Assignment{Assignment::kBoundary};
  return Assignment{best};
}

/// Strict halfspace membership: z in H^i_j iff phi_i(z) > phi_j(z).
inline bool in_halfspace(std::span<const Site> sites, std::size_t i, std::size_t j,
                         const Point& z, CostExponent p, const Domain& domain) {
  if (i == j) throw std::invalid_argument("in_halfspace: i and j must differ");
  if (i >= sites.size() || j >= sites.size())
    throw std::invalid_argument("in_halfspace: site index out of range");
  return phi(sites[i], z, p, domain) > phi(sites[j], z, p, domain);
}

}  // namespace ottess
