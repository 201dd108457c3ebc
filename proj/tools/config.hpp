#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rrf/engine.hpp"
#include "rrf/experiment.hpp"

namespace rrf::cli {

/// Every knob of the command-line tool. Config-file keys are the field names;
/// flags are the same names in kebab-case.
struct RunConfig {
  double gamma = 2.5;
  double alpha = 3.0;
  double v_min = 0.01;
  double R = 150.0;
  std::optional<std::uint64_t> seed;
  std::size_t n_steps = 1000;
  std::size_t n_replicas = 10;
  Mode mode = Mode::Annealed;

  double eps = 0.25;
  std::size_t n0 = 10;
  std::vector<std::size_t> horizons{1000, 10000};
  std::size_t burn_in = 0;

  std::string out;
  std::string out_dir;
  std::string env_file;
  std::string plot_dir;
  std::string manifest;

  int resample_cap = 1000;
  double palm_c = 1.0;
  double log_v0 = 0.0;
  std::size_t threads = 0;
  std::optional<double> refine_to;

  std::optional<double> sensitivity_v_min;
  std::optional<double> calibrate_target;
  std::size_t calibrate_samples = 1000;
  double line_budget = 5.0e5;

  /// Keys that were set by the config file or a flag, not by defaults.
  std::vector<std::string> explicit_keys;
  bool is_explicit(const std::string& key) const;
};

/// Defaults, then `file` (may be null), then `overrides`. Unknown keys and
/// ill-typed values raise ConfigError; so do the invariants below.
RunConfig resolve_config(const nlohmann::json* file, const nlohmann::json& overrides);

/// Range checks on the physical and analysis parameters.
void validate(const RunConfig& config);

nlohmann::json load_config_file(const std::string& path);

BatchConfig batch_of(const RunConfig& config);
AnalysisConfig analysis_of(const RunConfig& config);

}  // namespace rrf::cli
