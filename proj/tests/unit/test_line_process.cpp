#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rrf/errors.hpp"
#include "rrf/line_process.hpp"
#include "rrf/stats.hpp"

using namespace rrf;

TEST(ExpectedCount, Examples) {
  EXPECT_NEAR(expected_count(2.5, 1.0, 10.0), 31.4159, 1e-4);
  EXPECT_NEAR(expected_count(2.0, 1.0, 1.0), kPi, 1e-15);
  EXPECT_EQ(expected_count(2.5, INFINITY, 10.0), 0.0);
  EXPECT_THROW(expected_count(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(expected_count(0.5, 1.0, 1.0), DomainError);
}

TEST(ExpectedCount, MatchesNumericIntegral) {
  // Midpoint rule in log-speed over the intensity (gamma-1)/2 v^-gamma times
  // the r-theta area 2R * pi.
  const double gamma = 2.5, v_min = 0.5, R = 3.0;
  double integral = 0.0;
  const int steps = 200000;
  const double top = 60.0, h = top / steps;
  for (int i = 0; i < steps; ++i) {
    const double v = v_min * std::exp((i + 0.5) * h);
    integral += (gamma - 1.0) / 2.0 * std::pow(v, -gamma) * v * h;
  }
  integral *= 2.0 * R * kPi;
  EXPECT_NEAR(expected_count(gamma, v_min, R), integral, 1e-6 * integral);
}

TEST(SpeedSampler, InverseCdfExample) {
  EXPECT_NEAR(speed_from_uniform(2.5, 1.0, 0.75), std::pow(4.0, 2.0 / 3.0), 1e-12);
  EXPECT_NEAR(speed_from_uniform(2.5, 1.0, 0.75), 2.5198, 1e-4);
  EXPECT_EQ(speed_from_uniform(2.5, 3.0, 0.0), 3.0);
}

TEST(SpeedSampler, BandStaysInBand) {
  for (double u : {0.0, 0.3, 0.999999, 1.0 - 1e-16}) {
    const double v = band_speed_from_uniform(2.5, 0.25, 1.0, u);
    EXPECT_GE(v, 0.25);
    EXPECT_LT(v, 1.0);
  }
}

TEST(SampleEnvironment, Deterministic) {
  const Environment a = sample_environment({2.5, 1.0, 10.0, 42});
  const Environment b = sample_environment({2.5, 1.0, 10.0, 42});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.line(i), b.line(i));
  const Environment c = sample_environment({2.5, 1.0, 10.0, 43});
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = !(a.line(i) == c.line(i));
  EXPECT_TRUE(differs);
}

TEST(SampleEnvironment, LinesRespectWindowAndFloor) {
  const Environment env = sample_environment({1.7, 0.3, 4.0, 9});
  for (const Line& l : env.lines()) {
    EXPECT_GE(l.theta, 0.0);
    EXPECT_LT(l.theta, kPi);
    EXPECT_LT(std::abs(l.r), 4.0);
    EXPECT_GE(l.v, 0.3);
    EXPECT_TRUE(l.orient == 1 || l.orient == -1);
  }
}

TEST(SampleEnvironment, Errors) {
  EXPECT_THROW(sample_environment({1.0, 1.0, 10.0, 1}), DomainError);
  EXPECT_THROW(sample_environment({2.5, 1e-6, 10.0, 1}), ResourceError);
  EXPECT_THROW(Environment({2.5, 1.0, 1.0, 0}, {Line{0.0, 2.0, 1.0, 1}}), DomainError);
  EXPECT_THROW(Environment({2.5, 1.0, 1.0, 0}, {Line{0.0, 0.0, 0.5, 1}}), DomainError);
}

TEST(SampleEnvironment, MeanCountMatchesIntensity) {
  const int reps = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double n = static_cast<double>(sample_environment({2.5, 1.0, 10.0,
                                                             static_cast<std::uint64_t>(i)})
                                             .size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  EXPECT_LE(std::abs(mean - 10.0 * kPi), 3.0 * se);
}

TEST(RefineEnvironment, KeepsExistingLines) {
  const Environment base = sample_environment({2.5, 1.0, 10.0, 5});
  const Environment fine = refine_environment(base, 0.25, 77);
  ASSERT_GE(fine.size(), base.size());
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(fine.line(i), base.line(i));
  for (std::size_t i = base.size(); i < fine.size(); ++i) {
    EXPECT_GE(fine.line(i).v, 0.25);
    EXPECT_LT(fine.line(i).v, 1.0);
  }
  EXPECT_EQ(fine.v_min(), 0.25);
  ASSERT_EQ(fine.layers().size(), 1u);
  EXPECT_EQ(fine.layers()[0].first_id, base.size());
  EXPECT_THROW(refine_environment(base, 1.0, 1), DomainError);
  EXPECT_THROW(refine_environment(base, 2.0, 1), DomainError);
}

TEST(RefineEnvironment, BandMeanCount) {
  const double expected = 10.0 * kPi * (std::pow(0.25, -1.5) - 1.0);
  EXPECT_NEAR(expected, 219.9, 0.05);
  const int reps = 2000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const Environment base = sample_environment({2.5, 1.0, 10.0, static_cast<std::uint64_t>(i)});
    const double added = static_cast<double>(
        refine_environment(base, 0.25, 1000 + static_cast<std::uint64_t>(i)).size() -
        base.size());
    sum += added;
    sum2 += added * added;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  EXPECT_LE(std::abs(mean - expected), 3.0 * se);
}

TEST(RefineEnvironment, NearlyEmptyBand) {
  const Environment base = sample_environment({2.5, 1.0, 10.0, 3});
  const Environment fine = refine_environment(base, std::nextafter(1.0, 0.0), 4);
  EXPECT_EQ(fine.size(), base.size());
}

TEST(RefineEnvironment, SuperpositionMatchesDirectSample) {
  const int reps = 1000;
  std::vector<double> layered, direct;
  for (int i = 0; i < reps; ++i) {
    const auto seed = static_cast<std::uint64_t>(i);
    const Environment base = sample_environment({2.5, 1.0, 3.0, seed});
    layered.push_back(static_cast<double>(refine_environment(base, 0.5, seed + 50000).size()));
    direct.push_back(static_cast<double>(sample_environment({2.5, 0.5, 3.0, seed + 90000}).size()));
  }
  const double crit = 1.63 * std::sqrt(2.0 / reps);
  EXPECT_LT(ks_two_sample(layered, direct), crit);
  // Speeds pooled over the refined environments follow the direct law above
  // the new floor.
  std::vector<double> pooled;
  for (int i = 0; i < 200; ++i) {
    const Environment base = sample_environment({2.5, 1.0, 3.0, 7000u + i});
    const Environment fine = refine_environment(base, 0.5, 8000u + i);
    for (const Line& l : fine.lines()) pooled.push_back(l.v);
  }
  const double ks = ks_statistic(pooled, [](double v) { return 1.0 - std::pow(v / 0.5, -1.5); });
  EXPECT_LT(ks, ks_critical_99(pooled.size()));
}

namespace {

Environment axis_with_crossers() {
  // Line 0 is the x-axis; lines 1 and 2 are verticals through x = 1 and x = 3.
  // A vertical line has theta = pi/2 and normal (-1, 0), so x = -r.
  return Environment({2.5, 0.5, 10.0, 0}, {Line{0.0, 0.0, 1.0, 1},
                                           Line{kPi / 2, -3.0, 1.0, 1},
                                           Line{kPi / 2, -1.0, 2.0, -1}});
}

}  // namespace

TEST(CrossingsAlong, OrderedForward) {
  const Environment env = axis_with_crossers();
  const auto c = crossings_along(env, 0, 0.0, +1);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].other, 2u);
  EXPECT_NEAR(c[0].cross.s_on_first, 1.0, 1e-12);
  EXPECT_EQ(c[1].other, 1u);
  EXPECT_NEAR(c[1].cross.s_on_first, 3.0, 1e-12);
}

TEST(CrossingsAlong, BackwardIsEmpty) {
  const Environment env = axis_with_crossers();
  EXPECT_TRUE(crossings_along(env, 0, 0.0, -1).empty());
  EXPECT_THROW(crossings_along(env, 7, 0.0, 1), InvalidState);
}

TEST(CrossingsAlong, BothDirectionsCoverEveryLine) {
  const Environment env = sample_environment({2.2, 0.5, 6.0, 123});
  ASSERT_GT(env.size(), 20u);
  for (std::size_t id = 0; id < env.size(); id += 5) {
    std::multiset<std::size_t> seen;
    const double from = 0.37;
    for (int dir : {1, -1}) {
      const auto c = crossings_along(env, id, from, dir);
      for (std::size_t k = 1; k < c.size(); ++k) {
        const double a = dir * (c[k - 1].cross.s_on_first - from);
        const double b = dir * (c[k].cross.s_on_first - from);
        EXPECT_LE(a, b);
      }
      for (const auto& x : c) seen.insert(x.other);
    }
    std::size_t expect = 0;
    for (std::size_t j = 0; j < env.size(); ++j) {
      if (j == id || env.line(j).theta == env.line(id).theta) continue;
      ++expect;
      EXPECT_EQ(seen.count(j), 1u);
    }
    EXPECT_EQ(seen.size(), expect);
  }
}

TEST(CrossingIndex, SegmentQueryMatchesBruteForce) {
  const Environment env = sample_environment({2.5, 0.05, 5.0, 8});
  ASSERT_GT(env.size(), 1000u);
  Rng rng(3);
  for (int q = 0; q < 200; ++q) {
    const std::size_t id = rng.index(env.size());
    const double h = env.half_chord(id);
    double a = rng.uniform(-h, h), b = rng.uniform(-h, h);
    if (a > b) std::swap(a, b);
    std::set<std::size_t> indexed, brute;
    for (const auto& c : env.crossings_in_segment(id, a, b)) indexed.insert(c.other);
    for (const auto& c : crossings_along(env, id, a, 1)) {
      if (c.cross.s_on_first <= b) brute.insert(c.other);
    }
    EXPECT_EQ(indexed, brute);
  }
}

TEST(CrossingIndex, ThinnedKeepRates) {
  // A unit-speed x-axis in a layered environment; keep frequency per line
  // should match min{1, v^alpha}.
  Environment base = sample_environment({2.5, 0.1, 2.0, 17});
  std::vector<Line> lines(base.lines().begin(), base.lines().end());
  lines.push_back({0.0, 0.0, 1.0, 1});
  const Environment env(base.params(), lines);
  const std::size_t axis = env.size() - 1;
  const auto all = env.crossings_in_segment(axis, -1.5, 1.5);
  ASSERT_GT(all.size(), 50u);
  const double alpha = 3.0;
  std::map<std::size_t, int> kept;
  Rng rng(21);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    for (const auto& c : env.thinned_crossings_in_segment(axis, -1.5, 1.5, 1.0, alpha,
                                                          env.size(), rng)) {
      ++kept[c.other];
    }
  }
  double expected_total = 0.0, observed_total = 0.0;
  for (const auto& c : all) {
    const double p = std::min(1.0, std::pow(env.line(c.other).v, alpha));
    expected_total += p;
    const double freq = kept[c.other] / static_cast<double>(trials);
    EXPECT_NEAR(freq, p, 5.0 * std::sqrt(p * (1 - p) / trials) + 1e-12) << "line " << c.other;
  }
  for (const auto& [id, n] : kept) observed_total += n;
  observed_total /= trials;
  EXPECT_NEAR(observed_total, expected_total, 0.02 * expected_total);
}

TEST(CrossingIndex, ThinnedExcludesLine) {
  const Environment env = axis_with_crossers();
  Rng rng(1);
  const auto kept = env.thinned_crossings_in_segment(0, -5, 5, 1.0, 3.0, 2, rng);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].other, 1u);
}

TEST(CrossingRate, MatchesPowerLaw) {
  // Crossings of the x-axis segment [-5, 5] by lines of speed >= u occur at
  // rate u^(1 - gamma) per unit length.
  const double gamma = 2.5;
  for (double u : {1.0, 2.0}) {
    double sum = 0.0, sum2 = 0.0;
    const int reps = 3000;
    for (int i = 0; i < reps; ++i) {
      const Environment env = sample_environment({gamma, 1.0, 10.0, 500u + i});
      double count = 0.0;
      for (const Line& l : env.lines()) {
        if (l.v < u || l.theta == 0.0) continue;
        const double x = intersect({0.0, 0.0, 1.0, 1}, l).point.x;
        if (std::abs(x) <= 5.0) count += 1.0;
      }
      sum += count / 10.0;
      sum2 += count * count / 100.0;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    EXPECT_LE(std::abs(mean - std::pow(u, 1.0 - gamma)), 3.0 * se) << "u=" << u;
  }
}
