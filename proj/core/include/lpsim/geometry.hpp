#ifndef LPSIM_GEOMETRY_HPP
#define LPSIM_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace lpsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

// Quadrant-aware bearing of `v`, east = 0, counter-clockwise, in (-pi, pi].
inline double bearing(Vec2 v) { return std::atan2(v.y, v.x); }

// Absolute angular separation of two bearings, wrapped to [0, pi].
inline double angle_between(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 2.0 * M_PI);
  return d > M_PI ? 2.0 * M_PI - d : d;
}

struct NearestOnSegment {
  Vec2 point;
  double dist = 0.0;
  double t = 0.0;  // parameter along [a,b], clamped to [0,1]
};

inline NearestOnSegment nearest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = 0.0;
  if (len2 > 0.0) {
    t = dot(p - a, ab) / len2;
    t = std::fmin(1.0, std::fmax(0.0, t));
  }
  const Vec2 q = a + ab * t;
  return {q, distance(p, q), t};
}

struct NearestOnPolyline {
  Vec2 point;
  double dist = 0.0;
  double along = 0.0;  // arc length from the first vertex to `point`
  std::size_t segment = 0;
};

inline NearestOnPolyline nearest_point_on_polyline(Vec2 p, std::span<const Vec2> poly) {
  NearestOnPolyline best;
  best.dist = std::numeric_limits<double>::infinity();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const auto cand = nearest_point_on_segment(p, poly[i], poly[i + 1]);
    const double seg_len = distance(poly[i], poly[i + 1]);
    if (cand.dist < best.dist) {
      best.point = cand.point;
      best.dist = cand.dist;
      best.along = cum + cand.t * seg_len;
      best.segment = i;
    }
    cum += seg_len;
  }
  if (poly.size() == 1) {
    best = {poly[0], distance(p, poly[0]), 0.0, 0};
  }
  return best;
}

inline double polyline_length(std::span<const Vec2> poly) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) len += distance(poly[i], poly[i + 1]);
  return len;
}

// Position at arc length `d` from the first vertex. Clamps to the endpoints.
inline Vec2 point_at_arc_length(std::span<const Vec2> poly, double d) {
  if (poly.empty()) return {};
  if (d <= 0.0) return poly[0];
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const double seg = distance(poly[i], poly[i + 1]);
    if (cum + seg >= d && seg > 0.0) {
      const double t = (d - cum) / seg;
      return poly[i] + (poly[i + 1] - poly[i]) * t;
    }
    cum += seg;
  }
  return poly.back();
}

}  // namespace lpsim

#endif
