#pragma once

// Ambient spaces for the tessellation library: planar simple polygons with the
// Euclidean metric and the unit 2-sphere with the geodesic (great-circle)
// metric. Points are tagged with the space they live in; the free functions
// below are the only metric primitives the rest of the library uses.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ottess {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

enum class DomainKind { EuclideanPolygon, UnitSphere };

/// Raised when a geodesic is not unique (antipodal endpoints on the sphere).
class NonUniqueGeodesic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of one of the two ambient spaces. Planar points store (x, y);
/// sphere points store a unit 3-vector.
class Point {
 public:
  static Point planar(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw std::invalid_argument("planar point must have finite coordinates");
    return Point(DomainKind::EuclideanPolygon, {x, y, 0.0});
  }

  static Point planar(Vec2 v) { return planar(v.x, v.y); }

  static Point sphere(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 1e-12) || !std::isfinite(n))
      throw std::invalid_argument("sphere point must be a nonzero finite vector");
    if (std::abs(n - 1.0) <= 1e-12)  // already unit: keep the coordinates bit-stable
      return Point(DomainKind::UnitSphere, {x, y, z});
    return Point(DomainKind::UnitSphere, {x / n, y / n, z / n});
  }

  static Point sphere(Vec3 v) { return sphere(v.x, v.y, v.z); }

  DomainKind kind() const { return kind_; }
  double x() const { return c_[0]; }
  double y() const { return c_[1]; }
  double z() const { return c_[2]; }
  Vec2 xy() const { return {c_[0], c_[1]}; }
  Vec3 xyz() const { return {c_[0], c_[1], c_[2]}; }

 private:
  Point(DomainKind kind, std::array<double, 3> c) : kind_(kind), c_(c) {}
  DomainKind kind_;
  std::array<double, 3> c_;
};

namespace detail {

inline double segment_point_distance(Vec2 a, Vec2 b, Vec2 q) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(q - a);
  const double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
  return norm(q - (a + t * ab));
}

inline int orientation_sign(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

inline bool on_segment(Vec2 a, Vec2 b, Vec2 q) {
  return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
}

// Closed-segment intersection test used by the polygon simplicity check.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace detail

/// The ambient space M: either a simple closed polygon in the plane (stored
/// counterclockwise) or the unit sphere S^2.
class Domain {
 public:
  static Domain polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3)
      throw std::invalid_argument("polygon needs at least 3 vertices");
    for (const Vec2& v : vertices)
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw std::invalid_argument("polygon vertex must be finite");

    double signed_area = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % n];
      signed_area += cross(a, b);
    }
    signed_area *= 0.5;
    if (std::abs(signed_area) < 1e-12)
      throw std::invalid_argument("degenerate polygon: area below 1e-12");
    if (signed_area < 0.0) std::reverse(vertices.begin(), vertices.end());

    // Simplicity: no two non-adjacent edges may touch.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        if (adjacent) continue;
        if (detail::segments_intersect(vertices[i], vertices[(i + 1) % n],
                                       vertices[j], vertices[(j + 1) % n]))
          throw std::invalid_argument("polygon is not simple (edges intersect)");
      }
    }

    Domain d;
    d.kind_ = DomainKind::EuclideanPolygon;
    d.vertices_ = std::move(vertices);
    return d;
  }

  static Domain unit_sphere() {
    Domain d;
    d.kind_ = DomainKind::UnitSphere;
    return d;
  }

  DomainKind kind() const { return kind_; }

  const std::vector<Vec2>& vertices() const {
    require_polygon();
    return vertices_;
  }

  /// Axis-aligned bounding box of the polygon.
  std::pair<Vec2, Vec2> bounding_box() const {
    require_polygon();
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-lo.x, -lo.y};
    for (const Vec2& v : vertices_) {
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
    return {lo, hi};
  }

  /// Diameter of the space: max vertex-pair distance for a polygon, pi for S^2.
  double diameter() const {
    if (kind_ == DomainKind::UnitSphere) return kPi;
    double d = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j)
        d = std::max(d, norm(vertices_[i] - vertices_[j]));
    return d;
  }

  bool is_convex() const {
    require_polygon();
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = vertices_[i];
      const Vec2& b = vertices_[(i + 1) % n];
      const Vec2& c = vertices_[(i + 2) % n];
      if (cross(b - a, c - b) < -1e-12) return false;
    }
    return true;
  }

 private:
  void require_polygon() const {
    if (kind_ != DomainKind::EuclideanPolygon)
      throw std::invalid_argument("operation requires a polygon domain");
  }

  DomainKind kind_ = DomainKind::UnitSphere;
  std::vector<Vec2> vertices_;
};

namespace detail {

inline void require_same_kind(const Domain& domain, const Point& a) {
  if (a.kind() != domain.kind())
    throw std::invalid_argument("point does not belong to this domain kind");
}

}  // namespace detail

/// Geodesic distance between two points of the domain. Euclidean in the
/// plane; arccos of the clamped dot product on the sphere (range [0, pi]).
inline double distance(const Domain& domain, const Point& a, const Point& b) {
  detail::require_same_kind(domain, a);
  detail::require_same_kind(domain, b);
  if (domain.kind() == DomainKind::EuclideanPolygon)
    return norm(a.xy() - b.xy());
  const double c = std::clamp(dot(a.xyz(), b.xyz()), -1.0, 1.0);
  return std::acos(c);
}

/// Point at parameter t in [0,1] along the minimizing geodesic from a to b.
/// Linear interpolation in the plane, slerp on the sphere. Throws
/// NonUniqueGeodesic for an antipodal pair on the sphere.
inline Point geodesic_point(const Domain& domain, const Point& a, const Point& b, double t) {
  detail::require_same_kind(domain, a);
  detail::require_same_kind(domain, b);
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("geodesic parameter must lie in [0,1]");
  if (domain.kind() == DomainKind::EuclideanPolygon) {
    const Vec2 q = a.xy() + t * (b.xy() - a.xy());
    return Point::planar(q);
  }
  const double c = std::clamp(dot(a.xyz(), b.xyz()), -1.0, 1.0);
  if (1.0 + c <= 1e-12)
    throw NonUniqueGeodesic("antipodal endpoints: geodesic is not unique");
  const double omega = std::acos(c);
  if (omega < 1e-12) return a;
  const double s = std::sin(omega);
  const Vec3 q = (std::sin((1.0 - t) * omega) / s) * a.xyz() +
                 (std::sin(t * omega) / s) * b.xyz();
  return Point::sphere(q);
}

/// Antipode -a on the sphere.
inline Point antipode(const Domain& domain, const Point& a) {
  if (domain.kind() != DomainKind::UnitSphere)
    throw std::invalid_argument("antipode is defined on the sphere only");
  detail::require_same_kind(domain, a);
  return Point::sphere(-1.0 * a.xyz());
}

/// Membership test. Polygon boundary counts as inside (closed domain);
/// every point of S^2 is in the sphere domain.
inline bool contains(const Domain& domain, const Point& a) {
  detail::require_same_kind(domain, a);
  if (domain.kind() == DomainKind::UnitSphere) return true;

  const std::vector<Vec2>& vs = domain.vertices();
  const Vec2 q = a.xy();
  const std::size_t n = vs.size();
  for (std::size_t i = 0; i < n; ++i)
    if (detail::segment_point_distance(vs[i], vs[(i + 1) % n], q) <= 1e-12)
      return true;

  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& vi = vs[i];
    const Vec2& vj = vs[j];
    if ((vi.y > q.y) != (vj.y > q.y)) {
      const double x_cross = vi.x + (q.y - vi.y) / (vj.y - vi.y) * (vj.x - vi.x);
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace ottess
