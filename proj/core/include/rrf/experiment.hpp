#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrf/engine.hpp"
#include "rrf/line_process.hpp"
#include "rrf/stats.hpp"

namespace rrf {

/// Runs body(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// Each index is handled exactly once; the first exception is rethrown.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

struct BatchConfig {
  Mode mode = Mode::Annealed;
  double gamma = 2.5;
  double alpha = 3.0;
  double v_min = 1.0;
  double radius = 10.0;
  std::uint64_t seed = 0;
  std::size_t n_steps = 1000;
  std::size_t n_replicas = 1;
  std::size_t threads = 0;

  double log_v0 = 0.0;  // annealed starting log-speed

  // Quenched only.
  double palm_c = 1.0;
  int max_resamples = 1000;
  /// Shared by every replica when set. Otherwise each replica draws the disk
  /// |r| < palm_c per Palm attempt ("palm-disk#<attempt>") and the rest of the
  /// window once ("environment", then "refine").
  std::shared_ptr<const Environment> environment;
  /// Refine each replica's environment down to this floor before running.
  /// Lines outside the Palm disk keep their base draw.
  std::optional<double> refine_to;
};

struct ReplicaRun {
  Trajectory traj;
  std::size_t env_lines = 0;
  int palm_attempts = 0;
};

std::vector<ReplicaRun> run_batch(const BatchConfig& config);

/// Run parameters that travel with a set of trajectories.
struct RunMeta {
  Mode mode = Mode::Annealed;
  double gamma = 2.5;
  double alpha = 3.0;
  double v_min = 0.0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_steps = 0;
};

RunMeta meta_of(const BatchConfig& config);

struct AnalysisConfig {
  double eps = 0.25;
  std::size_t n0 = 10;
  std::vector<std::size_t> horizons{1000, 10000};
  std::size_t burn_in = 0;
};

struct KsSummary {
  std::size_t n = 0;
  double ks = 0.0;
  double critical_99 = 0.0;
};

struct Sensitivity {
  double v_min_low = 0.0;
  double u_ks_low = 0.0;
  double delta_u_ks = 0.0;
  double delta_u_mean = 0.0;
  double delta_phi_ks = 0.0;
  double delta_scaled_distance_mean = 0.0;
  double delta_completed_fraction = 0.0;
};

struct Calibration {
  double target_fraction = 0.8;
  std::size_t n_steps = 0;
  std::size_t n_samples = 0;
  double radius_needed = 0.0;
  double radius_used = 0.0;
  double line_budget = 0.0;
};

struct ExperimentReport {
  RunMeta meta;
  AnalysisConfig analysis;
  std::size_t n_replicas = 0;

  Regime regime = Regime::Critical;
  double predicted_mean = 0.0;
  double predicted_variance = 0.0;
  double predicted_scaled_distance_mean = 0.0;

  MeanEstimate u;
  KsSummary u_ks;
  KsSummary phi_ks;
  MeanEstimate scaled_distance;

  // Final ergodic average a_n of each replica with at least one step.
  std::size_t ergodic_replicas = 0;
  double ergodic_fraction_positive = 0.0;
  double ergodic_fraction_negative = 0.0;
  MeanEstimate ergodic_final;

  std::vector<double> recurrence;  // one per horizon

  // Variance across replicas of log_v(n) - log_v(0) at each horizon reached.
  std::vector<std::size_t> sum_u_replicas;
  std::vector<double> sum_u_variance;

  std::size_t gave_up = 0;
  std::size_t censored = 0;
  std::size_t completed = 0;  // reached n_steps without censoring
  double completed_fraction = 0.0;
  double mean_steps = 0.0;
  double mean_total_time = 0.0;

  std::optional<Sensitivity> sensitivity;
  std::optional<Calibration> calibration;
};

/// Pooled statistics over replicas. Steps before burn_in are dropped from
/// the u, phi, and distance samples; ergodic and recurrence statistics use
/// whole series. Throws EmptySample if no replica has a post-burn-in step.
ExperimentReport analyze(const RunMeta& meta, std::span<const Trajectory> trajectories,
                         const AnalysisConfig& config);

/// Fills report.sensitivity from a matched run at a lower speed floor.
void attach_sensitivity(ExperimentReport& report, const ExperimentReport& low_floor);

/// Smallest window radius holding the whole path of `target_fraction` of
/// annealed n_steps-step flights started at speed exp(log_v0) from the
/// origin. Lines below the floor only push speeds up, so this is a lower
/// bound for the quenched model.
Calibration calibrate_radius(const LawParams& law, double log_v0, std::size_t n_steps,
                             double target_fraction, std::size_t n_samples,
                             std::uint64_t seed);

/// Report as a JSON document with a trailing newline; stable key order.
std::string report_json(const ExperimentReport& report);

/// Writes ergodic_average.csv, u_density.csv and recurrence.csv into `dir`.
void write_plot_data(const std::string& dir, const ExperimentReport& report,
                     std::span<const Trajectory> trajectories);

}  // namespace rrf
