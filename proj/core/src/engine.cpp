#include "rrf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrf/errors.hpp"

namespace rrf {

double accept_prob(double v_cur, double v_new, double alpha) {
  if (!(v_cur > 0.0) || !(v_new > 0.0)) {
    throw DomainError("accept_prob: speeds must be positive");
  }
  if (!(alpha > 0.0)) throw DomainError("accept_prob: alpha must be positive");
  if (v_new >= v_cur) return 1.0;
  return std::pow(v_new / v_cur, alpha);
}

namespace {

void require_state(const Environment& env, const RRFState& state) {
  if (state.prev_line >= env.size() || state.cur_line >= env.size()) {
    throw InvalidState("state refers to a line outside the environment");
  }
  if (state.prev_line == state.cur_line) {
    throw InvalidState("previous and current line coincide");
  }
  if (state.dir != 1 && state.dir != -1) throw InvalidState("direction must be +1 or -1");
}

}  // namespace

QuenchedStep step_quenched(const Environment& env, const RRFState& state, double alpha,
                           Rng& rng) {
  require_state(env, state);
  if (!(alpha > env.gamma() - 1.0)) {
    throw DomainError("step_quenched: alpha must exceed gamma - 1");
  }
  const Line& cur = env.line(state.cur_line);
  const double dir = static_cast<double>(state.dir);
  const double h = env.half_chord(state.cur_line);
  const double remaining = std::max(0.0, dir * (dir * h - state.s_pos));
  const double speed = std::exp(state.log_v);

  // First guess: the mean distance to acceptance in the stationary regime.
  const double rate_down = alpha - (env.gamma() - 1.0);
  double chunk = std::max(1e-9 * env.radius(),
                          std::pow(cur.v, env.gamma() - 1.0) * rate_down / alpha);
  const double pad = 1e-9 * std::max(1.0, env.radius());

  // Coins for every crossing of a chunk are drawn together; the first kept
  // crossing ahead is the first acceptance, since coins are independent.
  double done = 0.0;
  while (done < remaining) {
    const double next = std::min(remaining, done + chunk);
    const double a = state.s_pos + dir * done;
    const double b = state.s_pos + dir * next;
    const auto kept = env.thinned_crossings_in_segment(
        state.cur_line, std::min(a, b) - pad, std::max(a, b) + pad, cur.v, alpha,
        state.prev_line, rng);
    const Crossing* best = nullptr;
    double best_dist = 0.0;
    for (const auto& c : kept) {
      const double dist = dir * (c.cross.s_on_first - state.s_pos);
      if (!(dist > done && dist <= next)) continue;
      if (!best || dist < best_dist || (dist == best_dist && c.other < best->other)) {
        best = &c;
        best_dist = dist;
      }
    }
    if (best) {
      const Line& other = env.line(best->other);
      const double u = std::log(other.v / cur.v);
      StepRecord rec{u, best->cross.phi, best_dist, best_dist / speed, false};
      RRFState next_state{state.cur_line,           best->other,
                          best->cross.s_on_second,  rng.sign(),
                          state.n + 1,              state.t_cont + rec.t,
                          state.log_v + u};
      return {next_state, rec};
    }
    done = next;
    chunk *= 2.0;
  }
  return {std::nullopt, StepRecord{0.0, 0.0, remaining, remaining / speed, true}};
}

StepRecord step_annealed(const LawParams& law, double log_v, Rng& rng) {
  StepRecord rec;
  const double scaled = rng.exponential(scaled_distance_rate(law));
  rec.d = scaled * std::exp(law.rate_up() * log_v);
  rec.t = rec.d / std::exp(log_v);
  rec.u = laplace_quantile(law, rng.uniform_open());
  rec.phi = sine_angle_quantile(rng.uniform_open());
  return rec;
}

double expected_palm_weight(double gamma, double alpha, double v_min, double c) {
  if (!(alpha > gamma - 1.0)) throw DomainError("alpha must exceed gamma - 1");
  if (!(v_min > 0.0) || !(c > 0.0)) throw DomainError("need v_min > 0 and c > 0");
  // Chord lengths integrate to pi c^2 over r, angles to pi; h(v) is the
  // weighted crossing rate on a line of speed v.
  const double b = alpha - gamma + 1.0;
  const double lo = std::max(c, v_min);
  const double fast_and_slow = (1.0 + (gamma - 1.0) / b) * std::pow(lo, 2.0 - 2.0 * gamma) /
                               (2.0 * gamma - 2.0);
  const double floor_loss = (gamma - 1.0) / b * std::pow(v_min, b) *
                            std::pow(lo, 1.0 - gamma - alpha) / (gamma + alpha - 1.0);
  return kPi * kPi * c * c * (gamma - 1.0) / 2.0 * (fast_and_slow - floor_loss);
}

std::optional<RRFState> palm_select(const Environment& env, double c, double alpha,
                                    Rng& rng) {
  if (!(c > 0.0) || c > env.radius()) {
    throw DomainError("palm_select: c must lie in (0, window radius]");
  }
  if (!(alpha > env.gamma() - 1.0)) {
    throw DomainError("palm_select: alpha must exceed gamma - 1");
  }
  std::vector<std::size_t> candidates;
  const auto lines = env.lines();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (std::abs(lines[i].r) < c && lines[i].v > c) candidates.push_back(i);
  }
  if (candidates.empty()) return std::nullopt;
  const std::size_t cur_id = candidates[rng.index(candidates.size())];
  const Line& cur = lines[cur_id];

  const double half = std::sqrt(c * c - cur.r * cur.r);
  auto crossings = env.crossings_in_segment(cur_id, -half, half);
  std::sort(crossings.begin(), crossings.end(),
            [](const Crossing& a, const Crossing& b) { return a.other < b.other; });
  double total = 0.0;
  std::vector<double> weights;
  weights.reserve(crossings.size());
  for (const auto& x : crossings) {
    const double w = accept_prob(cur.v, lines[x.other].v, alpha);
    weights.push_back(w);
    total += w;
  }
  if (crossings.empty() || !(total > 0.0)) return std::nullopt;
  const double cap = 16.0 * expected_palm_weight(env.gamma(), alpha, env.v_min(), c);
  if (!rng.bernoulli(static_cast<double>(candidates.size()) * total / cap)) {
    return std::nullopt;
  }
  const double target = rng.uniform() * total;
  std::size_t pick = 0;
  double acc = 0.0;
  for (; pick + 1 < weights.size(); ++pick) {
    acc += weights[pick];
    if (target < acc) break;
  }
  RRFState state;
  state.prev_line = crossings[pick].other;
  state.cur_line = cur_id;
  state.s_pos = crossings[pick].cross.s_on_first;
  state.dir = rng.sign();
  state.log_v = std::log(cur.v);
  return state;
}

PalmStart init_palm(const std::function<Environment(int)>& environment, double c,
                    double alpha, Rng& rng, int max_resamples) {
  for (int attempt = 0; attempt < max_resamples; ++attempt) {
    Environment env = environment(attempt);
    if (auto state = palm_select(env, c, alpha, rng)) {
      return {std::move(env), *state, attempt + 1};
    }
  }
  throw GiveUp("init_palm: no qualifying line pair after " +
               std::to_string(max_resamples) + " environments");
}

RelativeView relativize(const Environment& env, const RRFState& state, double gamma) {
  require_state(env, state);
  const Line& prev = env.line(state.prev_line);
  const Line& cur = env.line(state.cur_line);
  RelativeView view;
  view.frame = relativizing_similarity(prev, cur, gamma);
  const Similarity inv = view.frame.inverse();
  view.u_prev = std::log(prev.v / cur.v);
  view.phi = arc_angle(prev, cur);
  view.previous = inv.apply(prev);
  view.current = inv.apply(cur);
  const auto lines = env.lines();
  view.others.reserve(lines.size() - 2);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == state.prev_line || i == state.cur_line) continue;
    view.others.push_back(inv.apply(lines[i]));
  }
  return view;
}

Trajectory run_quenched(const Environment& env, const RRFState& init, double alpha,
                        std::size_t n_steps, Rng& rng) {
  require_state(env, init);
  Trajectory traj;
  traj.mode = Mode::Quenched;
  auto push_state = [&](const RRFState& s) {
    traj.log_v.push_back(s.log_v);
    traj.t_cont.push_back(s.t_cont);
    traj.position.push_back(env.line(s.cur_line).point_at(s.s_pos));
    traj.prev_id.push_back(static_cast<std::int64_t>(s.prev_line));
    traj.cur_id.push_back(static_cast<std::int64_t>(s.cur_line));
  };
  push_state(init);
  RRFState state = init;
  traj.records.reserve(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    QuenchedStep step = step_quenched(env, state, alpha, rng);
    if (!step.next) {
      traj.censored_tail = step.record;
      const Line& cur = env.line(state.cur_line);
      traj.exit_point = cur.point_at(state.s_pos + state.dir * step.record.d);
      break;
    }
    traj.records.push_back(step.record);
    state = *step.next;
    push_state(state);
  }
  return traj;
}

Trajectory run_annealed(const LawParams& law, double log_v0, std::size_t n_steps,
                        Rng& rng) {
  Trajectory traj;
  traj.mode = Mode::Annealed;
  traj.records.reserve(n_steps);
  double log_v = log_v0;
  double t_cont = 0.0;
  Vec2 pos;
  double heading = 0.0;
  auto push = [&] {
    traj.log_v.push_back(log_v);
    traj.t_cont.push_back(t_cont);
    traj.position.push_back(pos);
    traj.prev_id.push_back(-1);
    traj.cur_id.push_back(-1);
  };
  push();
  for (std::size_t k = 0; k < n_steps; ++k) {
    const StepRecord rec = step_annealed(law, log_v, rng);
    pos = pos + rec.d * Vec2{std::cos(heading), std::sin(heading)};
    const double line_angle = fold_pi(heading) + rec.phi;
    heading = line_angle + (rng.sign() > 0 ? 0.0 : kPi);
    log_v += rec.u;
    t_cont += rec.t;
    traj.records.push_back(rec);
    push();
  }
  return traj;
}

}  // namespace rrf
