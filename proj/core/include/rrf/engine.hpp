#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rrf/geometry.hpp"
#include "rrf/line_process.hpp"
#include "rrf/random.hpp"
#include "rrf/stats.hpp"

namespace rrf {

/// min{1, (v_new / v_cur)^alpha}: faster lines are always accepted.
double accept_prob(double v_cur, double v_new, double alpha);

/// Chain state: the particle sits at the crossing of prev_line and cur_line
/// and is about to travel along cur_line in direction dir.
struct RRFState {
  std::size_t prev_line = 0;
  std::size_t cur_line = 0;
  double s_pos = 0.0;
  int dir = 1;
  std::uint64_t n = 0;
  double t_cont = 0.0;
  double log_v = 0.0;
};

struct StepRecord {
  double u = 0.0;    // log(V_n / V_{n-1})
  double phi = 0.0;  // arc angle from the old line to the new one
  double d = 0.0;    // distance travelled along the old line
  double t = 0.0;    // d / V_{n-1}
  bool censored = false;
};

struct QuenchedStep {
  std::optional<RRFState> next;  // empty when the window edge came first
  StepRecord record;
};

/// Walks cur_line from s_pos in direction dir, testing each crossing strictly
/// ahead with accept_prob. Crossings outside the window are not part of the
/// environment, so reaching the edge censors the step.
QuenchedStep step_quenched(const Environment& env, const RRFState& state, double alpha,
                           Rng& rng);

/// Regenerative step from the stationary laws, starting at speed exp(log_v):
/// u ~ asymmetric Laplace, phi ~ half-sine, d / V^(gamma-1) ~ Exp(alpha/(alpha-(gamma-1))).
StepRecord step_annealed(const LawParams& law, double log_v, Rng& rng);

/// Mean over environments of the total selection weight: the sum over lines
/// with |r| < c and v > c of min{1, (v_other / v)^alpha} over their crossings
/// within distance c of the origin.
double expected_palm_weight(double gamma, double alpha, double v_min, double c);

/// One Palm-style selection attempt in `env`. The current line is uniform
/// among lines with |r| < c and v > c, the previous line is drawn among lines
/// crossing it within distance c of the origin with weights
/// min{1, (v_prev / v_cur)^alpha}. The attempt itself is kept with
/// probability N * S / cap, where N counts the candidate current lines, S is
/// the weight total on the chosen one and cap = 16 * expected_palm_weight.
/// Empty if either set is empty or the attempt is rejected.
std::optional<RRFState> palm_select(const Environment& env, double c, double alpha,
                                    Rng& rng);

struct PalmStart {
  Environment env;
  RRFState state;
  int attempts = 0;
};

/// Calls `environment(attempt)` and palm_select until one succeeds; throws
/// GiveUp after max_resamples failed environments.
PalmStart init_palm(const std::function<Environment(int)>& environment, double c,
                    double alpha, Rng& rng, int max_resamples);

struct RelativeView {
  double u_prev = 0.0;  // log(v_prev / v_cur)
  double phi = 0.0;     // arc angle from prev to cur
  Similarity frame;     // maps the standard frame to the world
  Line previous;
  Line current;              // (theta 0, r 0, v 1, orient +1) up to rounding
  std::vector<Line> others;  // every other line, relativized
};

RelativeView relativize(const Environment& env, const RRFState& state, double gamma);

enum class Mode { Quenched, Annealed };

struct Trajectory {
  Mode mode = Mode::Annealed;
  std::vector<StepRecord> records;       // accepted steps
  std::vector<double> log_v;             // records.size() + 1
  std::vector<double> t_cont;            // records.size() + 1
  std::vector<Vec2> position;            // records.size() + 1
  std::vector<std::int64_t> prev_id;     // records.size() + 1, -1 when annealed
  std::vector<std::int64_t> cur_id;      // records.size() + 1, -1 when annealed
  std::optional<StepRecord> censored_tail;
  Vec2 exit_point;
  bool gave_up = false;

  bool censored() const { return censored_tail.has_value(); }
  std::size_t steps() const { return records.size(); }
};

Trajectory run_quenched(const Environment& env, const RRFState& init, double alpha,
                        std::size_t n_steps, Rng& rng);
Trajectory run_annealed(const LawParams& law, double log_v0, std::size_t n_steps,
                        Rng& rng);

}  // namespace rrf
