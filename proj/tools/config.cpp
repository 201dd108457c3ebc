#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "rrf/errors.hpp"
#include "rrf/io.hpp"

namespace rrf::cli {

using nlohmann::json;

bool RunConfig::is_explicit(const std::string& key) const {
  return std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end();
}

namespace {

template <class T>
T as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(key + ": expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && v.get<std::int64_t>() < 0 &&
          !v.is_number_unsigned()) {
        throw ConfigError(key + ": must not be negative");
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(key + ": expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

using Setter = std::function<void(RunConfig&, const json&)>;

template <class T>
Setter plain(T RunConfig::*field, std::string key) {
  return [field, key](RunConfig& c, const json& v) { c.*field = as<T>(v, key); };
}

template <class T>
Setter optional(std::optional<T> RunConfig::*field, std::string key) {
  return [field, key](RunConfig& c, const json& v) {
    if (v.is_null()) c.*field = std::nullopt;
    else c.*field = as<T>(v, key);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"gamma", plain(&RunConfig::gamma, "gamma")},
      {"alpha", plain(&RunConfig::alpha, "alpha")},
      {"v_min", plain(&RunConfig::v_min, "v_min")},
      {"R", plain(&RunConfig::R, "R")},
      {"seed", optional(&RunConfig::seed, "seed")},
      {"n_steps", plain(&RunConfig::n_steps, "n_steps")},
      {"n_replicas", plain(&RunConfig::n_replicas, "n_replicas")},
      {"mode",
       [](RunConfig& c, const json& v) { c.mode = parse_mode(as<std::string>(v, "mode")); }},
      {"eps", plain(&RunConfig::eps, "eps")},
      {"n0", plain(&RunConfig::n0, "n0")},
      {"horizons",
       [](RunConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("horizons: expected an array");
         c.horizons.clear();
         for (const auto& h : v) c.horizons.push_back(as<std::size_t>(h, "horizons"));
       }},
      {"burn_in", plain(&RunConfig::burn_in, "burn_in")},
      {"out", plain(&RunConfig::out, "out")},
      {"out_dir", plain(&RunConfig::out_dir, "out_dir")},
      {"env_file", plain(&RunConfig::env_file, "env_file")},
      {"plot_dir", plain(&RunConfig::plot_dir, "plot_dir")},
      {"manifest", plain(&RunConfig::manifest, "manifest")},
      {"resample_cap", plain(&RunConfig::resample_cap, "resample_cap")},
      {"palm_c", plain(&RunConfig::palm_c, "palm_c")},
      {"log_v0", plain(&RunConfig::log_v0, "log_v0")},
      {"threads", plain(&RunConfig::threads, "threads")},
      {"refine_to", optional(&RunConfig::refine_to, "refine_to")},
      {"sensitivity_v_min", optional(&RunConfig::sensitivity_v_min, "sensitivity_v_min")},
      {"calibrate_target", optional(&RunConfig::calibrate_target, "calibrate_target")},
      {"calibrate_samples", plain(&RunConfig::calibrate_samples, "calibrate_samples")},
      {"line_budget", plain(&RunConfig::line_budget, "line_budget")},
  };
  return table;
}

void apply(RunConfig& c, const json& values, const char* source) {
  if (!values.is_object()) throw ConfigError(std::string(source) + " must be a JSON object");
  for (const auto& [key, value] : values.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(std::string(source) + ": unknown key '" + key + "'");
    }
    it->second(c, value);
    if (!c.is_explicit(key)) c.explicit_keys.push_back(key);
  }
}

}  // namespace

RunConfig resolve_config(const json* file, const json& overrides) {
  RunConfig c;
  if (file) apply(c, *file, "config file");
  if (!overrides.is_null()) apply(c, overrides, "flags");
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw ConfigError(message);
  };
  require(std::isfinite(c.gamma) && c.gamma > 1.0, "gamma must exceed 1");
  require(std::isfinite(c.alpha) && c.alpha > c.gamma - 1.0, "alpha must exceed gamma - 1");
  require(std::isfinite(c.v_min) && c.v_min > 0.0, "v_min must be positive");
  require(std::isfinite(c.R) && c.R > 0.0, "R must be positive");
  require(std::isfinite(c.eps) && c.eps > 0.0, "eps must be positive");
  require(!c.horizons.empty(), "horizons must not be empty");
  for (std::size_t h : c.horizons) require(h > c.n0, "every horizon must exceed n0");
  require(c.resample_cap > 0, "resample_cap must be positive");
  require(std::isfinite(c.log_v0), "log_v0 must be finite");
  require(std::isfinite(c.palm_c) && c.palm_c > 0.0, "palm_c must be positive");
  if (c.refine_to) require(*c.refine_to > 0.0 && *c.refine_to < c.v_min,
                           "refine_to must lie in (0, v_min)");
  if (c.sensitivity_v_min) require(*c.sensitivity_v_min > 0.0 && *c.sensitivity_v_min < c.v_min,
                                   "sensitivity_v_min must lie in (0, v_min)");
  if (c.calibrate_target) require(*c.calibrate_target > 0.0 && *c.calibrate_target <= 1.0,
                                  "calibrate_target must lie in (0, 1]");
  require(c.calibrate_samples > 0, "calibrate_samples must be positive");
  require(c.line_budget > 0.0, "line_budget must be positive");
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

BatchConfig batch_of(const RunConfig& c) {
  BatchConfig b;
  b.mode = c.mode;
  b.gamma = c.gamma;
  b.alpha = c.alpha;
  b.v_min = c.v_min;
  b.radius = c.R;
  b.seed = *c.seed;
  b.n_steps = c.n_steps;
  b.n_replicas = c.n_replicas;
  b.threads = c.threads;
  b.log_v0 = c.log_v0;
  b.palm_c = c.palm_c;
  b.max_resamples = c.resample_cap;
  b.refine_to = c.refine_to;
  return b;
}

AnalysisConfig analysis_of(const RunConfig& c) {
  return AnalysisConfig{c.eps, c.n0, c.horizons, c.burn_in};
}

}  // namespace rrf::cli
