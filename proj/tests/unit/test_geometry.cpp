#include <gtest/gtest.h>

#include <cmath>

#include "rrf/errors.hpp"
#include "rrf/geometry.hpp"
#include "rrf/random.hpp"

using namespace rrf;

namespace {

Line random_line(Rng& rng) {
  return {rng.uniform(0.0, kPi), rng.uniform(-5.0, 5.0), std::exp(rng.uniform(-2.0, 2.0)),
          rng.sign()};
}

// Implicit form of the line: n . p = r.
double residual(const Line& l, Vec2 p) {
  return -std::sin(l.theta) * p.x + std::cos(l.theta) * p.y - l.r;
}

}  // namespace

TEST(Intersect, AxesMeetAtOrigin) {
  const LineCross c = intersect({0.0, 0.0, 1.0, 1}, {kPi / 2, 0.0, 1.0, 1});
  EXPECT_NEAR(c.point.x, 0.0, 1e-15);
  EXPECT_NEAR(c.point.y, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(c.phi, kPi / 2);
}

TEST(Intersect, HorizontalLineMeetsYAxis) {
  const LineCross c = intersect({0.0, 1.0, 1.0, 1}, {kPi / 2, 0.0, 1.0, 1});
  EXPECT_NEAR(c.point.x, 0.0, 1e-15);
  EXPECT_NEAR(c.point.y, 1.0, 1e-15);
}

TEST(Intersect, ParallelThrows) {
  EXPECT_THROW(intersect({0.3, 0.0, 1.0, 1}, {0.3, 2.0, 1.0, -1}), ParallelLines);
}

TEST(Intersect, RandomPairsSatisfyBothEquations) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Line a = random_line(rng), b = random_line(rng);
    const LineCross c = intersect(a, b);
    EXPECT_LE(std::abs(residual(a, c.point)), 1e-12);
    EXPECT_LE(std::abs(residual(b, c.point)), 1e-12);
    EXPECT_GT(c.phi, 0.0);
    EXPECT_LT(c.phi, kPi);
    const Vec2 pa = a.point_at(c.s_on_first), pb = b.point_at(c.s_on_second);
    EXPECT_NEAR(pa.x, c.point.x, 1e-9);
    EXPECT_NEAR(pb.y, c.point.y, 1e-9);
  }
}

TEST(ArcAngle, Examples) {
  EXPECT_NEAR(arc_angle({0.2, 0, 1, 1}, {2.9, 0, 1, 1}), 2.7, 1e-12);
  EXPECT_NEAR(arc_angle({2.9, 0, 1, 1}, {0.2, 0, 1, 1}), 0.2 - 2.9 + kPi, 1e-12);
  EXPECT_NEAR(arc_angle({2.9, 0, 1, 1}, {0.2, 0, 1, 1}), 0.4418, 5e-4);
  EXPECT_THROW(arc_angle({1.0, 0, 1, 1}, {1.0, 3, 1, 1}), ParallelLines);
}

TEST(ArcAngle, RotationInvariant) {
  const Line a{0.2, 0.5, 1, 1}, b{2.9, -1.0, 1, 1};
  const Similarity rot = Similarity::make(1.0, 1.0, {}, 2.5);
  EXPECT_NEAR(arc_angle(rot.apply(a), rot.apply(b)), arc_angle(a, b), 1e-12);
}

TEST(Similarity, JointInvariants) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Line a = random_line(rng), b = random_line(rng);
    const double gamma = rng.uniform(1.5, 3.0);
    const Similarity s = Similarity::make(rng.uniform(-7.0, 7.0), std::exp(rng.uniform(-2.0, 2.0)),
                                          {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}, gamma);
    EXPECT_NEAR(arc_angle(s.apply(a), s.apply(b)), arc_angle(a, b), 1e-12);
    const Vec2 moved = s.apply(intersect(a, b).point);
    const Vec2 crossed = intersect(s.apply(a), s.apply(b)).point;
    const double scale = std::max(1.0, norm(moved));
    EXPECT_LE(norm(moved - crossed) / scale, 1e-9);
    EXPECT_NEAR(s.apply(a).v, a.v * s.speed_factor, 1e-12 * a.v * s.speed_factor);
  }
}

TEST(Similarity, CompositionKeepsSpeedLaw) {
  const double gamma = 2.5;
  const Similarity s1 = Similarity::make(0.3, 2.0, {1.0, 0.0}, gamma);
  const Similarity s2 = Similarity::make(-1.1, 0.7, {0.0, 2.0}, gamma);
  const Similarity c = s2.compose(s1);
  EXPECT_NEAR(c.speed_factor, s1.speed_factor * s2.speed_factor, 1e-14);
  EXPECT_NEAR(c.speed_factor, std::pow(c.spatial_scale, 1.0 / (gamma - 1.0)), 1e-14);
  const Vec2 p{0.4, -2.0};
  const Vec2 direct = s2.apply(s1.apply(p)), composed = c.apply(p);
  EXPECT_NEAR(direct.x, composed.x, 1e-12);
  EXPECT_NEAR(direct.y, composed.y, 1e-12);
  const Vec2 back = c.inverse().apply(composed);
  EXPECT_NEAR(back.x, p.x, 1e-12);
  EXPECT_NEAR(back.y, p.y, 1e-12);
}

TEST(RelativizingSimilarity, StandardCurrentLineIsIdentity) {
  const Line prev{kPi / 3, 0.0, 2.0, 1};
  const Line cur{0.0, 0.0, 1.0, 1};
  const Similarity s = relativizing_similarity(prev, cur, 2.5);
  EXPECT_NEAR(s.rotation, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.spatial_scale, 1.0);
  EXPECT_DOUBLE_EQ(s.speed_factor, 1.0);
  EXPECT_NEAR(norm(s.translation), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.inverse().apply(prev).v, 2.0);
}

TEST(RelativizingSimilarity, ScaleFollowsSpeed) {
  const Line prev{1.0, 0.3, 1.0, 1};
  const Line cur{0.4, -0.2, 4.0, -1};
  const Similarity s = relativizing_similarity(prev, cur, 2.0);
  EXPECT_NEAR(s.spatial_scale, 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.speed_factor, 4.0);
}

TEST(RelativizingSimilarity, MapsCurrentToStandardFrame) {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    const Line prev = random_line(rng), cur = random_line(rng);
    const double gamma = rng.uniform(1.5, 3.0);
    const Similarity inv = relativizing_similarity(prev, cur, gamma).inverse();
    const Line c = inv.apply(cur);
    // theta may fold to just below pi with the opposite orient; the sensed
    // direction is what must be (1, 0).
    EXPECT_NEAR(c.sense().x, 1.0, 1e-9);
    EXPECT_NEAR(c.sense().y, 0.0, 1e-9);
    EXPECT_NEAR(c.r, 0.0, 1e-9);
    EXPECT_NEAR(c.v, 1.0, 1e-12);
    const Line p = inv.apply(prev);
    EXPECT_NEAR(p.r, 0.0, 1e-9);
    EXPECT_NEAR(p.v, prev.v / cur.v, 1e-12 * prev.v / cur.v);
    const double folded = std::abs(arc_angle(c, p) - arc_angle(cur, prev));
    EXPECT_LE(std::min(folded, kPi - folded), 1e-9);
  }
}

TEST(RelativizingSimilarity, RejectsBadGamma) {
  EXPECT_THROW(relativizing_similarity({1.0, 0, 1, 1}, {0.0, 0, 1, 1}, 1.0), DomainError);
  EXPECT_THROW(relativizing_similarity({1.0, 0, 1, 1}, {1.0, 1, 1, 1}, 2.0), ParallelLines);
}

TEST(Line, ThroughRoundTrips) {
  const Line l = Line::through({1.0, 2.0}, 2.0 + kPi, 3.0);
  EXPECT_GE(l.theta, 0.0);
  EXPECT_LT(l.theta, kPi);
  EXPECT_NEAR(l.offset({1.0, 2.0}), 0.0, 1e-12);
  const Vec2 s = l.sense();
  EXPECT_NEAR(s.x, std::cos(2.0 + kPi), 1e-12);
  EXPECT_NEAR(s.y, std::sin(2.0 + kPi), 1e-12);
}
