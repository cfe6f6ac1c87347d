#pragma once

// Analysis of the two-site level function
//   m(x, y, p) = ((x+1)^2 + y^2)^(p/2) - ((x-1)^2 + y^2)^(p/2)
// for sites x1 = (1,0), x2 = (-1,0): m is d^p to x2 minus d^p to x1, so the
// positive levels lie in the half-plane x > 0 and the set {m = alpha} is the
// cell interface once the site weights are set to b1 - b2 = -alpha/p. The
// level set is a graph x = eta(y); the implicit derivatives of eta are
// evaluated in closed form, and the witness builders turn the curvature
// facts (axis extremum, inflection for p < 2) into concrete polygon domains
// whose site-1 cell is disconnected.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ottess/geometry.hpp"
#include "ottess/potential.hpp"

namespace ottess {

class SingularSlope : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LevelCurve {
  double p = 2.0;
  double alpha = 0.0;
  std::vector<Vec2> samples;     // (x, y), ordered by increasing y from 0
  bool terminated_early = false; // true if some y in [0, y_max] had no root x >= 1
  double y_max_requested = 0.0;
};

inline double m_value(double x, double y, CostExponent p) {
  const double a = (x + 1.0) * (x + 1.0) + y * y;
  const double b = (x - 1.0) * (x - 1.0) + y * y;
  return std::pow(a, p.value() / 2.0) - std::pow(b, p.value() / 2.0);
}

struct MPartials {
  double m, mx, my, mxx, mxy, myy;
};

inline MPartials m_partials(double x, double y, CostExponent pe) {
  const double p = pe.value();
  const double s = p / 2.0;
  const double a = (x + 1.0) * (x + 1.0) + y * y;
  const double b = (x - 1.0) * (x - 1.0) + y * y;
  const double as1 = std::pow(a, s - 1.0);
  const double bs1 = std::pow(b, s - 1.0);
  const double as2 = std::pow(a, s - 2.0);
  const double bs2 = std::pow(b, s - 2.0);

  MPartials r;
  r.m = std::pow(a, s) - std::pow(b, s);
  r.mx = p * ((x + 1.0) * as1 - (x - 1.0) * bs1);
  r.my = p * y * (as1 - bs1);
  r.mxx = p * (as1 - bs1 +
               (p - 2.0) * ((x + 1.0) * (x + 1.0) * as2 - (x - 1.0) * (x - 1.0) * bs2));
  r.mxy = p * (p - 2.0) * y * ((x + 1.0) * as2 - (x - 1.0) * bs2);
  r.myy = p * (as1 - bs1 + (p - 2.0) * y * y * (as2 - bs2));
  return r;
}

namespace detail {

inline double slope_or_throw(const MPartials& d) {
  if (std::abs(d.mx) < 1e-14)
    throw SingularSlope("level function has vanishing x-slope here");
  return d.mx;
}

}  // namespace detail

/// eta'(y) = -m_y / m_x for the implicit graph x = eta(y).
inline double eta_prime(double x, double y, CostExponent p) {
  const MPartials d = m_partials(x, y, p);
  return -d.my / detail::slope_or_throw(d);
}

/// eta''(y) = -(m_xx eta'^2 + 2 m_xy eta' + m_yy) / m_x, the second
/// derivative of the implicit graph.
inline double eta_second(double x, double y, CostExponent p) {
  const MPartials d = m_partials(x, y, p);
  const double mx = detail::slope_or_throw(d);
  const double ep = -d.my / mx;
  return -(d.mxx * ep * ep + 2.0 * d.mxy * ep + d.myy) / mx;
}

/// Sign of eta'' on the axis y = 0, from the closed-form quotient
/// [(x-1)^2]^(p/2-1) - [(x+1)^2]^(p/2-1) over a positive denominator.
/// Equals sign(2 - p) for x > 1 and vanishes at p = 2.
inline int eta_second_sign_at_axis(double x, CostExponent p) {
  const double e = p.value() / 2.0 - 1.0;
  const double num = std::pow((x - 1.0) * (x - 1.0), e) - std::pow((x + 1.0) * (x + 1.0), e);
  return (num > 0.0) - (num < 0.0);
}

/// Leading large-y behaviour of the cleared numerator of eta'':
/// 8 (p-1)(p-2) p^2 x y^(3p-8).
inline double asymptotic_leading(CostExponent pe, double x, double y) {
  const double p = pe.value();
  return 8.0 * (p - 1.0) * (p - 2.0) * p * p * x * std::pow(y, 3.0 * p - 8.0);
}

/// Numerator of eta'' after expansion over the common squared denominator
/// m_x^2 (with the leading p/m_x factor split off), i.e.
/// (2 m_xy m_y m_x - m_xx m_y^2 - m_yy m_x^2) / p = eta'' * m_x^3 / p.
/// Shares the sign of eta'' for x > 1 and matches asymptotic_leading as
/// y grows.
inline double eta_second_numerator(double x, double y, CostExponent p) {
  const MPartials d = m_partials(x, y, p);
  detail::slope_or_throw(d);
  return (2.0 * d.mxy * d.my * d.mx - d.mxx * d.my * d.my - d.myy * d.mx * d.mx) / p.value();
}

namespace detail {

/// Solve m(x, y, p) = alpha for x in [1, inf) by bracketed bisection.
/// m is strictly increasing in x there, so the root is unique when it exists.
/// Returns nullopt when m(1, y) > alpha or no bracket is found.
inline std::optional<double> solve_level_x(CostExponent p, double alpha, double y) {
  const double f_lo = m_value(1.0, y, p) - alpha;
  if (f_lo > 1e-10) return std::nullopt;
  if (std::abs(f_lo) <= 1e-10) return 1.0;

  double lo = 1.0;
  double hi = 2.0;
  while (m_value(hi, y, p) < alpha) {
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (hi > 1e12) return std::nullopt;
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = m_value(mid, y, p) - alpha;
    if (std::abs(f) <= 1e-10) return mid;
    if (f < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  return std::abs(m_value(mid, y, p) - alpha) <= 1e-10 ? std::optional<double>(mid)
                                                       : std::nullopt;
}

}  // namespace detail

/// Trace the branch x = eta(y) >= 1 of {m = alpha} over a uniform y-grid of
/// [0, y_max]. The curve is cut short (and flagged) at the first y where the
/// level has no root with x >= 1.
inline LevelCurve trace_level_curve(CostExponent p, double alpha, double y_max, int steps) {
  if (steps < 32) throw std::invalid_argument("trace_level_curve: steps must be >= 32");
  if (!(y_max > 0.0)) throw std::invalid_argument("trace_level_curve: y_max must be > 0");

  LevelCurve curve;
  curve.p = p.value();
  curve.alpha = alpha;
  curve.y_max_requested = y_max;
  curve.samples.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double y = y_max * static_cast<double>(k) / steps;
    const std::optional<double> x = detail::solve_level_x(p, alpha, y);
    if (!x) {
      curve.terminated_early = true;
      break;
    }
    curve.samples.push_back({*x, y});
  }
  return curve;
}

/// Smallest y* > 0 where eta'' changes sign along the traced curve, refined
/// by bisection to 1e-8. Returns nullopt when no sign change is found in the
/// traced range (the caller may retrace with a larger y_max).
inline std::optional<double> find_inflection(const LevelCurve& curve) {
  const CostExponent p(curve.p);
  if (curve.samples.size() < 3) return std::nullopt;

  auto e2_at = [&](double y) -> std::optional<double> {
    const std::optional<double> x = detail::solve_level_x(p, curve.alpha, y);
    if (!x) return std::nullopt;
    return eta_second(*x, y, p);
  };

  double prev_y = 0.0;
  double prev_e2 = 0.0;
  bool have_prev = false;
  for (const Vec2& s : curve.samples) {
    if (s.y <= 0.0) continue;
    const double e2 = eta_second(s.x, s.y, p);
    if (have_prev && prev_e2 != 0.0 && e2 != 0.0 &&
        ((prev_e2 > 0.0) != (e2 > 0.0))) {
      double lo = prev_y, hi = s.y;
      const bool lo_positive = prev_e2 > 0.0;
      while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        const std::optional<double> e2_mid = e2_at(mid);
        if (!e2_mid) return std::nullopt;
        if ((*e2_mid > 0.0) == lo_positive)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_y = s.y;
    prev_e2 = e2;
    have_prev = true;
  }
  return std::nullopt;
}

struct WitnessDomain {
  Domain polygon;
  std::vector<Site> sites;  // site 0 at (the image of) (1,0), site 1 at (-1,0)
  double p = 2.0;
  double alpha = 0.0;
  int expected_components = 0;

  // drawable extras, in the same coordinates as the polygon
  std::vector<Vec2> interface_polyline;  // the level set / bisector line
  std::array<Vec2, 2> chord{};           // the cutting edge of the polygon
  std::vector<Vec2> chord_crossings;     // where the edge meets the level set
  double rotation = 0.0;                 // rigid rotation applied to the whole scene
};

namespace detail {

inline Vec2 rotate(Vec2 v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct ChordCrossings {
  int count = 0;
  std::vector<Vec2> points;
};

// Count strict sign changes of m - alpha along the segment a->b, refining
// each bracket by bisection in the segment parameter.
inline ChordCrossings chord_crossings(CostExponent p, double alpha, Vec2 a, Vec2 b,
                                      int n_samples = 4096) {
  auto f = [&](double t) {
    const Vec2 q = a + t * (b - a);
    return m_value(q.x, q.y, p) - alpha;
  };
  ChordCrossings out;
  double prev_t = 0.0;
  double prev_f = f(0.0);
  for (int k = 1; k <= n_samples; ++k) {
    const double t = static_cast<double>(k) / n_samples;
    const double ft = f(t);
    if ((prev_f < 0.0 && ft > 0.0) || (prev_f > 0.0 && ft < 0.0)) {
      double lo = prev_t, hi = t;
      const bool lo_neg = prev_f < 0.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == lo_neg)
          lo = mid;
        else
          hi = mid;
      }
      const double tc = 0.5 * (lo + hi);
      out.points.push_back(a + tc * (b - a));
      ++out.count;
    }
    prev_t = t;
    prev_f = ft;
  }
  return out;
}

// Convex completion: chord edge lo->hi on the right, a horizontal top edge, a
// left circular-arc fan, and a horizontal bottom edge back to the chord.
inline std::vector<Vec2> complete_polygon(Vec2 chord_lo, Vec2 chord_hi, double left_x) {
  const double y_lo = chord_lo.y;
  const double y_hi = chord_hi.y;
  const double extent = y_hi - y_lo;
  const double bulge = std::min(1.0, 0.3 * extent);
  const double radius = extent * extent / (8.0 * bulge) + 0.5 * bulge;
  const Vec2 center{left_x + (radius - bulge), 0.5 * (y_lo + y_hi)};

  std::vector<Vec2> verts{chord_lo, chord_hi, {left_x, y_hi}};
  const double theta0 = std::atan2(y_hi - center.y, left_x - center.x);
  const int n_arc = 8;
  for (int k = 1; k <= n_arc; ++k) {
    const double t = theta0 + (2.0 * kPi - 2.0 * theta0) * k / (n_arc + 1);
    verts.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  verts.push_back({left_x, y_lo});
  return verts;
}

inline double distance_to_boundary(const Domain& polygon, Vec2 q) {
  const std::vector<Vec2>& vs = polygon.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vs.size(); ++i)
    best = std::min(best, segment_point_distance(vs[i], vs[(i + 1) % vs.size()], q));
  return best;
}

}  // namespace detail

/// Convex polygon on which the cell of site 1 splits into two components.
/// For p < 2 the cutting edge is a chord through two curve points straddling
/// the inflection of eta (three crossings); for p > 2 it is a vertical
/// segment at x = c in (1, eta(0)) (two crossings). The whole configuration
/// is rigidly rotated so the cutting edge is vertical, which keeps the thin
/// cell slivers aligned with the tessellation lattice.
inline WitnessDomain build_convex_witness(CostExponent pe, double alpha) {
  const double p = pe.value();
  if (p <= 1.0 || p == 2.0)
    throw std::invalid_argument("build_convex_witness: requires p in (1,inf) with p != 2");
  if (!(alpha > 0.0))
    throw std::invalid_argument("build_convex_witness: alpha must be > 0");

  const double left_x = -2.2;
  Vec2 chord_lo{}, chord_hi{};
  double rotation = 0.0;
  detail::ChordCrossings crossings;
  int required_crossings = 0;

  if (p < 2.0) {
    required_crossings = 3;
    // locate the inflection of eta, retracing further out if needed
    std::optional<double> ystar;
    double y_max = 8.0;
    for (int attempt = 0; attempt < 6 && !ystar; ++attempt, y_max *= 2.0)
      ystar = find_inflection(trace_level_curve(pe, alpha, y_max, 512));
    if (!ystar)
      throw ConstructionError("build_convex_witness: no inflection of eta found");

    const std::array<std::pair<double, double>, 5> candidates{
        {{0.2, 2.5}, {0.3, 2.2}, {0.5, 2.0}, {0.15, 2.8}, {0.6, 1.6}}};
    bool built = false;
    std::string last_failure = "no candidate chord attempted";
    for (const auto& [f1, f2] : candidates) {
      const double y1 = f1 * *ystar;
      const double y2 = f2 * *ystar;
      const std::optional<double> x1 = detail::solve_level_x(pe, alpha, y1);
      const std::optional<double> x2 = detail::solve_level_x(pe, alpha, y2);
      if (!x1 || !x2) {
        last_failure = "curve point missing at a candidate y";
        continue;
      }
      const double slope = (*x2 - *x1) / (y2 - y1);
      auto chord_x = [&](double y) { return *x1 + slope * (y - y1); };
      const double y_lo = -0.3 * *ystar;
      const double y_hi = y2 + std::max(0.5, 0.15 * (y2 - y1));
      const Vec2 lo{chord_x(y_lo), y_lo};
      const Vec2 hi{chord_x(y_hi), y_hi};
      if (m_value(lo.x, lo.y, pe) >= alpha || m_value(hi.x, hi.y, pe) <= alpha) {
        last_failure = "chord endpoints not on opposite sides of the level set";
        continue;
      }
      if (chord_x(0.0) <= 1.15) {
        last_failure = "chord passes too close to site 1";
        continue;
      }
      const detail::ChordCrossings c = detail::chord_crossings(pe, alpha, lo, hi);
      if (c.count != 3) {
        last_failure = "chord crossing count " + std::to_string(c.count) + ", need 3";
        continue;
      }
      chord_lo = lo;
      chord_hi = hi;
      crossings = c;
      rotation = std::atan(slope);
      built = true;
      break;
    }
    if (!built)
      throw ConstructionError("build_convex_witness: " + last_failure);
  } else {
    required_crossings = 2;
    if (!(m_value(1.0, 0.0, pe) < alpha))
      throw ConstructionError(
          "build_convex_witness: alpha too small, need m(1,0,p) < alpha for p > 2");
    const std::optional<double> x0 = detail::solve_level_x(pe, alpha, 0.0);
    if (!x0 || *x0 <= 1.0)
      throw ConstructionError("build_convex_witness: level set does not reach x > 1");
    const double c = 1.0 + 0.5 * (*x0 - 1.0);

    // m(c, y) grows monotonely in |y| for p > 2; find the crossing height
    double lo_y = 0.0, hi_y = 1.0;
    while (m_value(c, hi_y, pe) < alpha) {
      hi_y *= 2.0;
      if (hi_y > 1e6)
        throw ConstructionError("build_convex_witness: no crossing on the vertical segment");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo_y + hi_y);
      if (m_value(c, mid, pe) < alpha)
        lo_y = mid;
      else
        hi_y = mid;
    }
    const double y_c = 0.5 * (lo_y + hi_y);
    const double y_end = y_c + std::max(1.0, y_c);
    chord_lo = {c, -y_end};
    chord_hi = {c, y_end};
    crossings = detail::chord_crossings(pe, alpha, chord_lo, chord_hi);
    if (crossings.count != 2)
      throw ConstructionError("build_convex_witness: vertical segment crossing count " +
                              std::to_string(crossings.count) + ", need 2");
  }

  std::vector<Vec2> verts = detail::complete_polygon(chord_lo, chord_hi, left_x);
  for (Vec2& v : verts) v = detail::rotate(v, rotation);

  WitnessDomain witness{.polygon = Domain::polygon(verts)};
  witness.p = p;
  witness.alpha = alpha;
  witness.expected_components = 2;
  witness.rotation = rotation;
  witness.chord = {detail::rotate(chord_lo, rotation), detail::rotate(chord_hi, rotation)};
  for (const Vec2& q : crossings.points)
    witness.chord_crossings.push_back(detail::rotate(q, rotation));

  // weights: b1 - b2 = -alpha/p puts the interface {phi_1 = phi_2} on {m = alpha}
  witness.sites = {
      Site{Point::planar(detail::rotate({1.0, 0.0}, rotation)), 0.0, -alpha / p},
      Site{Point::planar(detail::rotate({-1.0, 0.0}, rotation)), 0.0, 0.0}};

  if (!witness.polygon.is_convex())
    throw ConstructionError("build_convex_witness: completion is not convex");
  for (const Site& s : witness.sites) {
    if (!contains(witness.polygon, s.position) ||
        detail::distance_to_boundary(witness.polygon, s.position.xy()) < 0.1)
      throw ConstructionError("build_convex_witness: a site is not strictly inside");
  }
  if (crossings.count != required_crossings)
    throw ConstructionError("build_convex_witness: crossing count changed after completion");

  // rendering polyline: the traced level set, mirrored across y = 0
  const double y_render = std::max(std::abs(chord_lo.y), std::abs(chord_hi.y));
  const LevelCurve curve = trace_level_curve(pe, alpha, y_render, 512);
  for (std::size_t k = curve.samples.size(); k-- > 1;)
    witness.interface_polyline.push_back(
        detail::rotate({curve.samples[k].x, -curve.samples[k].y}, rotation));
  for (const Vec2& s : curve.samples)
    witness.interface_polyline.push_back(detail::rotate(s, rotation));

  return witness;
}

/// Non-convex domain whose site-1 cell has exactly n_bumps components: a base
/// rectangle strictly left of the p = 2 bisector line x = alpha/4, with
/// n_bumps rectangular bumps attached to the right of the line, bump k scaled
/// by (kappa/2)^(k-1) and separated from bump k+1 by a gap 2 (kappa/2)^k.
inline WitnessDomain build_bump_witness(int n_bumps, double kappa) {
  if (n_bumps < 1) throw std::invalid_argument("build_bump_witness: n_bumps must be >= 1");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("build_bump_witness: kappa must lie in (0,1)");

  const double p = 2.0;
  const double alpha = 8.0;       // bisector line x = alpha/4 = 2, right of both sites
  const double line_x = alpha / 4.0;
  const double base_left = -3.0;
  const double base_bottom = -1.0;
  const double base_top = 3.2;
  const double margin = 0.2;

  // bump k: square of side (kappa/2)^(k-1), gap below bump k: 2 (kappa/2)^k
  struct Bump {
    double top, bottom, width;
  };
  std::vector<Bump> bumps;
  double t = 3.0;
  for (int k = 1; k <= n_bumps; ++k) {
    const double s = std::pow(kappa / 2.0, k - 1);
    bumps.push_back({t, t - s, s});
    t = t - s - 2.0 * std::pow(kappa / 2.0, k);
  }
  if (bumps.back().bottom < base_bottom + margin)
    throw ConstructionError(
        "build_bump_witness: bumps exceed the base edge; reduce kappa or n_bumps");

  std::vector<Vec2> verts{{base_left, base_bottom}, {line_x, base_bottom}};
  for (std::size_t k = bumps.size(); k-- > 0;) {  // ascending in y
    const Bump& bmp = bumps[k];
    verts.push_back({line_x, bmp.bottom});
    verts.push_back({line_x + bmp.width, bmp.bottom});
    verts.push_back({line_x + bmp.width, bmp.top});
    verts.push_back({line_x, bmp.top});
  }
  verts.push_back({line_x, base_top});
  verts.push_back({base_left, base_top});

  WitnessDomain witness{.polygon = Domain::polygon(verts)};
  witness.p = p;
  witness.alpha = alpha;
  witness.expected_components = n_bumps;
  witness.sites = {Site{Point::planar(1.0, 0.0), 0.0, -alpha / p},
                   Site{Point::planar(-1.0, 0.0), 0.0, 0.0}};
  witness.chord = {Vec2{line_x, base_bottom}, Vec2{line_x, base_top}};
  witness.interface_polyline = {witness.chord[0], witness.chord[1]};
  return witness;
}

}  // namespace ottess
