#pragma once

#include <cmath>
#include <numbers>

namespace rrf {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Folds an angle into [0, pi).
double fold_pi(double angle);

/// A speed-marked line with a preferred sense of travel.
///
/// Points are r*n + s*orient*d with d = (cos theta, sin theta) and
/// n = (-sin theta, cos theta); the arc coordinate s increases in the
/// preferred sense, starting from the foot of the perpendicular.
struct Line {
  double theta = 0.0;  // [0, pi)
  double r = 0.0;      // signed distance from the origin
  double v = 1.0;      // speed mark
  int orient = 1;      // +1 or -1

  Vec2 direction() const { return {std::cos(theta), std::sin(theta)}; }
  Vec2 normal() const { return {-std::sin(theta), std::cos(theta)}; }
  Vec2 sense() const { return static_cast<double>(orient) * direction(); }
  Vec2 point_at(double s) const { return r * normal() + s * sense(); }
  double arc_coordinate(Vec2 p) const { return dot(sense(), p); }
  /// Signed offset of p from the line along its normal (zero on the line).
  double offset(Vec2 p) const { return dot(normal(), p) - r; }

  /// Builds a line from any sense direction and a point on it.
  static Line through(Vec2 point, double sense_angle, double speed);

  friend bool operator==(const Line&, const Line&) = default;
};

struct LineCross {
  Vec2 point;
  double s_on_first = 0.0;
  double s_on_second = 0.0;
  double phi = 0.0;  // (theta2 - theta1) mod pi, in (0, pi)
};

/// Crossing of two lines. Throws ParallelLines when the angles coincide.
LineCross intersect(const Line& first, const Line& second);

/// Ordered crossing angle (second.theta - first.theta) mod pi, in (0, pi).
double arc_angle(const Line& first, const Line& second);

/// Proper similarity x -> scale * R(rotation) x + translation, with speed
/// marks multiplied by speed_factor = scale^(1/(gamma-1)).
struct Similarity {
  double rotation = 0.0;
  double spatial_scale = 1.0;
  Vec2 translation;
  double speed_factor = 1.0;

  static Similarity make(double rotation, double spatial_scale, Vec2 translation,
                         double gamma);
  static Similarity identity() { return {}; }

  Vec2 apply(Vec2 p) const;
  Line apply(const Line& line) const;
  Similarity inverse() const;
  /// (*this) after `inner`.
  Similarity compose(const Similarity& inner) const;
};

/// The similarity carrying the standard frame (unit-speed x-axis, positive
/// sense, crossing at the origin) onto `cur` with the crossing of `prev` and
/// `cur` as the image of the origin. Its inverse relativizes the environment.
Similarity relativizing_similarity(const Line& prev, const Line& cur, double gamma);

}  // namespace rrf
