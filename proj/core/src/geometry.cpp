#include "rrf/geometry.hpp"

#include <string>

#include "rrf/errors.hpp"

namespace rrf {

double fold_pi(double angle) {
  double a = std::fmod(angle, kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a = 0.0;  // fmod rounding at the upper edge
  return a;
}

Line Line::through(Vec2 point, double sense_angle, double speed) {
  double ang = std::remainder(sense_angle, 2.0 * kPi);  // (-pi, pi]
  Line line;
  line.v = speed;
  if (ang >= 0.0 && ang < kPi) {
    line.theta = ang;
    line.orient = 1;
  } else {
    line.theta = ang < 0.0 ? ang + kPi : 0.0;
    line.orient = -1;
  }
  if (line.theta >= kPi) line.theta = 0.0;
  line.r = dot(line.normal(), point);
  return line;
}

double arc_angle(const Line& first, const Line& second) {
  if (first.theta == second.theta) {
    throw ParallelLines("arc_angle: lines share theta = " +
                        std::to_string(first.theta));
  }
  return fold_pi(second.theta - first.theta);
}

LineCross intersect(const Line& first, const Line& second) {
  if (first.theta == second.theta) {
    throw ParallelLines("intersect: lines share theta = " +
                        std::to_string(first.theta));
  }
  const Vec2 n1 = first.normal();
  const Vec2 n2 = second.normal();
  const double det = n1.x * n2.y - n1.y * n2.x;
  if (det == 0.0) throw ParallelLines("intersect: numerically parallel lines");
  const Vec2 p{(first.r * n2.y - second.r * n1.y) / det,
               (n1.x * second.r - n2.x * first.r) / det};
  return {p, first.arc_coordinate(p), second.arc_coordinate(p),
          fold_pi(second.theta - first.theta)};
}

Similarity Similarity::make(double rotation, double spatial_scale, Vec2 translation,
                            double gamma) {
  if (!(gamma > 1.0)) throw DomainError("similarity: gamma must exceed 1");
  if (!(spatial_scale > 0.0)) throw DomainError("similarity: scale must be positive");
  return {rotation, spatial_scale, translation,
          std::pow(spatial_scale, 1.0 / (gamma - 1.0))};
}

Vec2 Similarity::apply(Vec2 p) const {
  return spatial_scale * rotate(p, rotation) + translation;
}

Line Similarity::apply(const Line& line) const {
  const Vec2 foot = apply(line.point_at(0.0));
  const double sense_angle =
      line.theta + rotation + (line.orient < 0 ? kPi : 0.0);
  return Line::through(foot, sense_angle, line.v * speed_factor);
}

Similarity Similarity::inverse() const {
  const double inv_scale = 1.0 / spatial_scale;
  const Vec2 t = rotate(translation, -rotation);
  return {-rotation, inv_scale, -inv_scale * t, 1.0 / speed_factor};
}

Similarity Similarity::compose(const Similarity& inner) const {
  return {rotation + inner.rotation, spatial_scale * inner.spatial_scale,
          apply(inner.translation), speed_factor * inner.speed_factor};
}

Similarity relativizing_similarity(const Line& prev, const Line& cur, double gamma) {
  const LineCross cross = intersect(prev, cur);
  if (!(cur.v > 0.0)) throw DomainError("relativizing_similarity: speed must be positive");
  const double sense_angle = cur.theta + (cur.orient < 0 ? kPi : 0.0);
  if (!(gamma > 1.0)) throw DomainError("relativizing_similarity: gamma must exceed 1");
  // speed_factor is v(cur) exactly; the scale follows as v^(gamma-1).
  return {sense_angle, std::pow(cur.v, gamma - 1.0), cross.point, cur.v};
}

}  // namespace rrf
