#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rrf/geometry.hpp"
#include "rrf/random.hpp"

namespace rrf {

struct EnvironmentParams {
  double gamma = 2.5;
  double v_min = 1.0;
  double radius = 10.0;
  std::uint64_t seed = 0;
};

/// A speed layer added by refinement: lines with speed in [v_floor, v_ceiling).
struct Layer {
  double v_floor = 0.0;
  double v_ceiling = 0.0;
  std::uint64_t seed = 0;
  std::size_t first_id = 0;
};

struct Crossing {
  std::size_t other = 0;
  LineCross cross;
};

/// Immutable finite realization of the speed-marked line process restricted to
/// lines with |r| < radius and v >= v_min.
class Environment {
 public:
  Environment(EnvironmentParams params, std::vector<Line> lines,
              std::vector<Layer> layers = {});

  const EnvironmentParams& params() const { return params_; }
  double gamma() const { return params_.gamma; }
  double v_min() const { return params_.v_min; }
  double radius() const { return params_.radius; }
  std::uint64_t seed() const { return params_.seed; }
  std::span<const Layer> layers() const { return layers_; }

  std::size_t size() const { return lines_->size(); }
  std::span<const Line> lines() const { return *lines_; }
  const Line& line(std::size_t id) const;

  /// Half-length of the chord of line `id` inside the window.
  double half_chord(std::size_t id) const;

  /// Crossings on line `id` whose arc coordinate lies in [s_lo, s_hi] and
  /// inside the window, unordered. Uses the angular index.
  std::vector<Crossing> crossings_in_segment(std::size_t id, double s_lo,
                                             double s_hi) const;

  /// Same crossings, each kept independently with probability
  /// min{1, (v_other / v_ref)^alpha}; line `exclude` is never reported.
  /// Slow lines are proposed by geometric skipping over the index, so the
  /// cost does not grow with the number of rejected crossings.
  std::vector<Crossing> thinned_crossings_in_segment(std::size_t id, double s_lo,
                                                     double s_hi, double v_ref,
                                                     double alpha, std::size_t exclude,
                                                     Rng& rng) const;

 private:
  struct Index;

  EnvironmentParams params_;
  std::shared_ptr<const std::vector<Line>> lines_;
  std::vector<Layer> layers_;
  std::shared_ptr<const Index> index_;
};

struct SamplingLimits {
  double max_expected_lines = 5.0e7;
};

/// Mean number of lines with speed >= v_min hitting the disk of radius R.
double expected_count(double gamma, double v_min, double radius);

/// Inverse-CDF speed draw: v_min * (1 - u)^(-1/(gamma-1)).
double speed_from_uniform(double gamma, double v_min, double u);

/// Same, restricted to the band [v_floor, v_ceiling).
double band_speed_from_uniform(double gamma, double v_floor, double v_ceiling, double u);

Environment sample_environment(const EnvironmentParams& params,
                               const SamplingLimits& limits = {});

/// Adds an independent layer of lines with speeds in [v_min_new, env.v_min).
/// Existing line ids are unchanged.
Environment refine_environment(const Environment& env, double v_min_new,
                               std::uint64_t layer_seed,
                               const SamplingLimits& limits = {});

/// Lines of `inner` (all with |r| < c) followed by the lines of `outer` with
/// |r| >= c. Since Poisson restrictions to disjoint sets are independent, an
/// inner disk drawn on its own can replace the inner disk of `outer`. Ids of
/// `inner` are kept.
Environment splice_inner_disk(const Environment& inner, const Environment& outer, double c);

/// Every crossing on the full line `id` strictly beyond from_s in direction
/// dir, nearest first, ties by other id. Brute force over all lines.
std::vector<Crossing> crossings_along(const Environment& env, std::size_t id,
                                      double from_s, int dir);

}  // namespace rrf
