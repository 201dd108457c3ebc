#include "rrf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "rrf/errors.hpp"
#include "rrf/io.hpp"

namespace rrf {

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::string tagged(const char* purpose, int attempt) {
  return std::string(purpose) + "#" + std::to_string(attempt);
}

ReplicaRun run_quenched_replica(const BatchConfig& cfg, const Environment* shared,
                                std::size_t replica) {
  // Palm attempts only look at lines with |r| < palm_c, so only that disk is
  // redrawn per attempt; the rest of the window is drawn once afterwards.
  const double floor = cfg.refine_to.value_or(cfg.v_min);
  auto factory = [&](int attempt) -> Environment {
    if (shared) return *shared;
    return sample_environment(
        {cfg.gamma, floor, cfg.palm_c,
         derive_seed(cfg.seed, replica, tagged("palm-disk", attempt))});
  };
  ReplicaRun run;
  run.traj.mode = Mode::Quenched;
  Rng palm(cfg.seed, replica, "palm");
  std::optional<PalmStart> start;
  try {
    start.emplace(init_palm(factory, cfg.palm_c, cfg.alpha, palm, cfg.max_resamples));
  } catch (const GiveUp&) {
    run.traj.gave_up = true;
    run.palm_attempts = cfg.max_resamples;
    return run;
  }
  if (!shared) {
    Environment world = sample_environment(
        {cfg.gamma, cfg.v_min, cfg.radius, derive_seed(cfg.seed, replica, "environment")});
    if (cfg.refine_to) {
      world = refine_environment(world, *cfg.refine_to,
                                 derive_seed(cfg.seed, replica, "refine"));
    }
    start->env = splice_inner_disk(start->env, world, cfg.palm_c);
  }
  Rng walk(cfg.seed, replica, "walk");
  run.traj = run_quenched(start->env, start->state, cfg.alpha, cfg.n_steps, walk);
  run.env_lines = start->env.size();
  run.palm_attempts = start->attempts;
  return run;
}

}  // namespace

std::vector<ReplicaRun> run_batch(const BatchConfig& cfg) {
  const LawParams law(cfg.gamma, cfg.alpha);
  std::vector<ReplicaRun> out(cfg.n_replicas);
  if (cfg.mode == Mode::Annealed) {
    parallel_for(cfg.n_replicas, cfg.threads, [&](std::size_t r) {
      Rng rng(cfg.seed, r, "annealed");
      out[r].traj = run_annealed(law, cfg.log_v0, cfg.n_steps, rng);
    });
    return out;
  }
  std::optional<Environment> shared;
  if (cfg.environment) {
    shared = *cfg.environment;
    if (cfg.refine_to) {
      shared = refine_environment(*shared, *cfg.refine_to,
                                  derive_seed(cfg.seed, 0, "refine-shared"));
    }
  }
  parallel_for(cfg.n_replicas, cfg.threads, [&](std::size_t r) {
    out[r] = run_quenched_replica(cfg, shared ? &*shared : nullptr, r);
  });
  return out;
}

RunMeta meta_of(const BatchConfig& c) {
  RunMeta m{c.mode, c.gamma, c.alpha, 0.0, 0.0, c.seed, c.n_steps};
  if (c.mode == Mode::Quenched) {
    m.v_min = c.refine_to ? *c.refine_to : (c.environment ? c.environment->v_min() : c.v_min);
    m.radius = c.environment ? c.environment->radius() : c.radius;
  }
  return m;
}

namespace {

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

ExperimentReport analyze(const RunMeta& meta, std::span<const Trajectory> trajectories,
                         const AnalysisConfig& config) {
  const LawParams law(meta.gamma, meta.alpha);
  ExperimentReport rep;
  rep.meta = meta;
  rep.analysis = config;
  rep.n_replicas = trajectories.size();
  rep.regime = classify_regime(law);
  rep.predicted_mean = laplace_mean(law);
  rep.predicted_variance = laplace_variance(law);
  rep.predicted_scaled_distance_mean = 1.0 / scaled_distance_rate(law);

  std::vector<double> u, phi, scaled, finals, total_time;
  std::vector<std::vector<double>> series;
  double steps = 0.0;
  for (const auto& tr : trajectories) {
    if (tr.gave_up || tr.log_v.empty()) {
      ++rep.gave_up;
      continue;
    }
    series.push_back(tr.log_v);
    steps += static_cast<double>(tr.steps());
    total_time.push_back(tr.t_cont.back());
    if (tr.censored()) ++rep.censored;
    else if (tr.steps() >= meta.n_steps) ++rep.completed;
    double sum = 0.0;
    for (std::size_t k = 0; k < tr.records.size(); ++k) {
      const StepRecord& rec = tr.records[k];
      sum += rec.u;
      if (k < config.burn_in) continue;
      u.push_back(rec.u);
      phi.push_back(rec.phi);
      scaled.push_back(rec.d / std::exp(law.rate_up() * tr.log_v[k]));
    }
    if (!tr.records.empty()) finals.push_back(sum / static_cast<double>(tr.steps()));
  }
  if (u.empty()) throw EmptySample("analyze: no post-burn-in steps");

  rep.u = estimate_mean(u);
  rep.u_ks = {u.size(), ks_statistic(u, [&](double y) { return laplace_cdf(law, y); }),
              ks_critical_99(u.size())};
  rep.phi_ks = {phi.size(), ks_statistic(phi, sine_angle_cdf), ks_critical_99(phi.size())};
  rep.scaled_distance = estimate_mean(scaled);

  rep.ergodic_replicas = finals.size();
  if (!finals.empty()) {
    std::size_t pos = 0, neg = 0;
    for (double a : finals) {
      pos += a > 0.0 ? 1 : 0;
      neg += a < 0.0 ? 1 : 0;
    }
    rep.ergodic_fraction_positive = static_cast<double>(pos) / finals.size();
    rep.ergodic_fraction_negative = static_cast<double>(neg) / finals.size();
    rep.ergodic_final = estimate_mean(finals);
  }

  if (!series.empty()) {
    rep.recurrence = recurrence_fraction(series, config.eps, config.n0, config.horizons);
  }
  for (std::size_t h : config.horizons) {
    std::vector<double> sums;
    for (const auto& s : series) {
      if (s.size() > h) sums.push_back(s[h] - s[0]);
    }
    rep.sum_u_replicas.push_back(sums.size());
    rep.sum_u_variance.push_back(sample_variance(sums));
  }

  const std::size_t ran = series.size();
  if (ran > 0) {
    rep.completed_fraction = static_cast<double>(rep.completed) / trajectories.size();
    rep.mean_steps = steps / static_cast<double>(ran);
    double t = 0.0;
    for (double x : total_time) t += x;
    rep.mean_total_time = t / static_cast<double>(ran);
  }
  return rep;
}

void attach_sensitivity(ExperimentReport& report, const ExperimentReport& low) {
  Sensitivity s;
  s.v_min_low = low.meta.v_min;
  s.u_ks_low = low.u_ks.ks;
  s.delta_u_ks = low.u_ks.ks - report.u_ks.ks;
  s.delta_u_mean = low.u.mean - report.u.mean;
  s.delta_phi_ks = low.phi_ks.ks - report.phi_ks.ks;
  s.delta_scaled_distance_mean = low.scaled_distance.mean - report.scaled_distance.mean;
  s.delta_completed_fraction = low.completed_fraction - report.completed_fraction;
  report.sensitivity = s;
}

Calibration calibrate_radius(const LawParams& law, double log_v0, std::size_t n_steps,
                             double target_fraction, std::size_t n_samples,
                             std::uint64_t seed) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw DomainError("calibrate_radius: target fraction must lie in (0, 1]");
  }
  if (n_samples == 0) throw EmptySample("calibrate_radius: no samples");
  std::vector<double> reach(n_samples);
  parallel_for(n_samples, 0, [&](std::size_t i) {
    Rng rng(seed, i, "calibration");
    const Trajectory tr = run_annealed(law, log_v0, n_steps, rng);
    double m = 0.0;
    for (Vec2 p : tr.position) m = std::max(m, norm(p));
    reach[i] = m;
  });
  std::sort(reach.begin(), reach.end());
  const auto k = static_cast<std::size_t>(
      std::ceil(target_fraction * static_cast<double>(n_samples)));
  Calibration c;
  c.target_fraction = target_fraction;
  c.n_steps = n_steps;
  c.n_samples = n_samples;
  c.radius_needed = reach[std::max<std::size_t>(k, 1) - 1];
  return c;
}

std::string report_json(const ExperimentReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = "rrf-report/1";
  j["params"] = {{"mode", std::string(mode_name(r.meta.mode))},
                 {"gamma", r.meta.gamma},
                 {"alpha", r.meta.alpha},
                 {"v_min", r.meta.v_min},
                 {"R", r.meta.radius},
                 {"seed", r.meta.seed},
                 {"seed_derivation", "derive_seed(seed, replica, purpose)"},
                 {"n_steps", r.meta.n_steps},
                 {"n_replicas", r.n_replicas},
                 {"burn_in", r.analysis.burn_in}};
  j["predicted"] = {{"regime", std::string(regime_name(r.regime))},
                    {"u_mean", r.predicted_mean},
                    {"u_variance", r.predicted_variance},
                    {"scaled_distance_mean", r.predicted_scaled_distance_mean}};
  j["u"] = {{"n", r.u.n},
            {"mean", r.u.mean},
            {"standard_error", r.u.standard_error},
            {"ks", r.u_ks.ks},
            {"ks_critical_99", r.u_ks.critical_99}};
  j["phi"] = {{"n", r.phi_ks.n}, {"ks", r.phi_ks.ks}, {"ks_critical_99", r.phi_ks.critical_99}};
  j["scaled_distance"] = {{"n", r.scaled_distance.n},
                          {"mean", r.scaled_distance.mean},
                          {"standard_error", r.scaled_distance.standard_error}};
  j["ergodic"] = {{"replicas", r.ergodic_replicas},
                  {"fraction_positive", r.ergodic_fraction_positive},
                  {"fraction_negative", r.ergodic_fraction_negative},
                  {"mean_final", r.ergodic_final.mean},
                  {"standard_error", r.ergodic_final.standard_error}};
  j["recurrence"] = {{"eps", r.analysis.eps},
                     {"n0", r.analysis.n0},
                     {"horizons", r.analysis.horizons},
                     {"fractions", r.recurrence}};
  j["sum_u_variance"] = {{"horizons", r.analysis.horizons},
                         {"replicas", r.sum_u_replicas},
                         {"variance", r.sum_u_variance}};
  j["censoring"] = {{"gave_up", r.gave_up},
                    {"censored", r.censored},
                    {"completed", r.completed},
                    {"completed_fraction", r.completed_fraction},
                    {"mean_steps", r.mean_steps}};
  j["mean_total_time"] = r.mean_total_time;
  if (r.sensitivity) {
    const auto& s = *r.sensitivity;
    j["sensitivity"] = {{"v_min_low", s.v_min_low},
                        {"u_ks_low", s.u_ks_low},
                        {"delta_u_ks", s.delta_u_ks},
                        {"delta_u_mean", s.delta_u_mean},
                        {"delta_phi_ks", s.delta_phi_ks},
                        {"delta_scaled_distance_mean", s.delta_scaled_distance_mean},
                        {"delta_completed_fraction", s.delta_completed_fraction}};
  }
  if (r.calibration) {
    const auto& c = *r.calibration;
    j["calibration"] = {{"target_fraction", c.target_fraction},
                        {"n_steps", c.n_steps},
                        {"n_samples", c.n_samples},
                        {"radius_needed", c.radius_needed},
                        {"radius_used", c.radius_used},
                        {"line_budget", c.line_budget}};
  }
  return j.dump(2) + "\n";
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path);
  return out;
}

}  // namespace

void write_plot_data(const std::string& dir, const ExperimentReport& report,
                     std::span<const Trajectory> trajectories) {
  const LawParams law(report.meta.gamma, report.meta.alpha);
  std::vector<std::vector<double>> series;
  std::size_t longest = 0;
  for (const auto& tr : trajectories) {
    if (tr.gave_up || tr.log_v.empty()) continue;
    series.push_back(tr.log_v);
    longest = std::max(longest, tr.steps());
  }

  {
    auto out = open_out(dir + "/ergodic_average.csv");
    out << "n,replicas,mean_a\n";
    for (std::size_t n = 1; n <= longest; ++n) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& s : series) {
        if (s.size() <= n) continue;
        sum += (s[n] - s[0]) / static_cast<double>(n);
        ++count;
      }
      out << n << ',' << count << ',' << format_double(sum / count) << '\n';
    }
  }

  {
    constexpr double lo = -8.0, width = 0.25;
    constexpr int bins = 64;
    std::vector<std::size_t> counts(bins, 0);
    std::size_t total = 0;
    for (const auto& tr : trajectories) {
      for (std::size_t k = report.analysis.burn_in; k < tr.records.size(); ++k) {
        ++total;
        const double y = tr.records[k].u;
        const auto b = static_cast<long>(std::floor((y - lo) / width));
        if (b >= 0 && b < bins) ++counts[b];
      }
    }
    auto out = open_out(dir + "/u_density.csv");
    out << "bin_lo,bin_hi,empirical,laplace_pdf\n";
    for (int b = 0; b < bins; ++b) {
      const double a = lo + b * width;
      const double mid = a + width / 2;
      const double emp = total ? counts[b] / (static_cast<double>(total) * width) : 0.0;
      out << format_double(a) << ',' << format_double(a + width) << ','
          << format_double(emp) << ',' << format_double(laplace_pdf(law, mid)) << '\n';
    }
  }

  {
    std::vector<std::size_t> grid(report.analysis.horizons);
    const std::size_t n0 = report.analysis.n0;
    if (longest > n0 + 1) {
      const double a = std::log(static_cast<double>(n0 + 1));
      const double b = std::log(static_cast<double>(longest));
      for (int i = 0; i <= 40; ++i) {
        grid.push_back(static_cast<std::size_t>(std::llround(std::exp(a + (b - a) * i / 40))));
      }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::erase_if(grid, [&](std::size_t h) { return h <= n0; });
    auto out = open_out(dir + "/recurrence.csv");
    out << "horizon,fraction\n";
    if (!series.empty()) {
      const auto hits = first_returns(series, report.analysis.eps, n0);
      for (std::size_t h : grid) {
        std::size_t c = 0;
        for (auto hit : hits) c += hit <= h ? 1 : 0;
        out << h << ',' << format_double(static_cast<double>(c) / hits.size()) << '\n';
      }
    }
  }
}

}  // namespace rrf
