#include <array>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "rrf/errors.hpp"

namespace {

using nlohmann::json;

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

int fail(int code, const std::string& type, const std::string& message) {
  const json record = {{"error", {{"kind", code == kConfigError ? "config" : "runtime"},
                                  {"type", type},
                                  {"message", message}}}};
  std::cerr << record.dump() << '\n';
  return code;
}

struct Subcommand {
  CLI::App* app = nullptr;
  json overrides = json::object();
  std::string config_file;
  std::vector<std::string> inputs;
};

template <class T>
void flag(Subcommand& sub, const std::string& names, const std::string& key,
          const std::string& help) {
  json* target = &sub.overrides;
  sub.app->add_option_function<T>(
      names, [target, key](const T& value) { (*target)[key] = value; }, help);
}

void add_run_config_flags(Subcommand& sub) {
  sub.app->add_option("--config", sub.config_file, "JSON file with RunConfig fields");
  flag<double>(sub, "--gamma", "gamma", "speed exponent, > 1");
  flag<double>(sub, "--alpha", "alpha", "acceptance exponent, > gamma - 1");
  flag<double>(sub, "--v-min", "v_min", "speed floor of the environment");
  flag<double>(sub, "--R,--radius", "R", "window radius");
  flag<std::uint64_t>(sub, "--seed", "seed", "master seed (mandatory)");
  flag<std::size_t>(sub, "--n-steps", "n_steps", "steps per replica");
  flag<std::size_t>(sub, "--n-replicas", "n_replicas", "number of replicas");
  flag<std::string>(sub, "--mode", "mode", "quenched or annealed");
  flag<double>(sub, "--eps", "eps", "recurrence neighbourhood");
  flag<std::size_t>(sub, "--n0", "n0", "recurrence lag");
  sub.app->add_option_function<std::string>(
      "--horizons",
      [&sub](const std::string& text) {
        std::vector<std::size_t> h;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          std::size_t used = 0;
          const unsigned long long v = std::stoull(item, &used);
          if (used != item.size()) throw CLI::ValidationError("--horizons", item);
          h.push_back(static_cast<std::size_t>(v));
        }
        sub.overrides["horizons"] = h;
      },
      "comma-separated recurrence horizons");
  flag<std::size_t>(sub, "--burn-in", "burn_in", "steps dropped from pooled samples");
  flag<std::string>(sub, "--out", "out", "output file (stdout when empty)");
  flag<std::string>(sub, "--out-dir", "out_dir", "directory for trajectory files");
  flag<std::string>(sub, "--env-file", "env_file", "environment file for quenched runs");
  flag<std::string>(sub, "--plot-dir", "plot_dir", "directory for plot CSVs");
  flag<std::string>(sub, "--manifest", "manifest", "manifest listing trajectories");
  flag<int>(sub, "--resample-cap", "resample_cap", "Palm environment resamples");
  flag<double>(sub, "--palm-c", "palm_c", "Palm selection radius");
  flag<double>(sub, "--log-v0", "log_v0", "annealed starting log-speed");
  flag<std::size_t>(sub, "--threads", "threads", "worker threads, 0 = all cores");
  flag<double>(sub, "--refine-to", "refine_to", "refine environments to this floor");
  flag<double>(sub, "--sensitivity-v-min", "sensitivity_v_min", "second floor for report");
  flag<double>(sub, "--calibrate-target", "calibrate_target",
               "fraction of uncensored episodes to size R for");
  flag<std::size_t>(sub, "--calibrate-samples", "calibrate_samples", "calibration flights");
  flag<double>(sub, "--line-budget", "line_budget", "cap on expected environment lines");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rayleigh random flights on speed-marked Poisson line processes"};
  app.require_subcommand(1);
  std::array<Subcommand, 4> subs;
  const std::array<std::pair<const char*, const char*>, 4> names{{
      {"sample-env", "sample an environment file"},
      {"run", "run replicas and write trajectory files"},
      {"analyze", "pool trajectory files into a report"},
      {"report", "run and analyze in one pass"},
  }};
  for (std::size_t i = 0; i < subs.size(); ++i) {
    subs[i].app = app.add_subcommand(names[i].first, names[i].second);
    add_run_config_flags(subs[i]);
  }
  subs[2].app->add_option("trajectories", subs[2].inputs, "trajectory files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(kConfigError, e.get_name(), e.what());
  }

  const Subcommand* active = nullptr;
  std::string command;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].app->parsed()) {
      active = &subs[i];
      command = names[i].first;
    }
  }

  rrf::cli::RunConfig config;
  try {
    json file;
    if (!active->config_file.empty()) file = rrf::cli::load_config_file(active->config_file);
    config = rrf::cli::resolve_config(active->config_file.empty() ? nullptr : &file,
                                      active->overrides);
    rrf::cli::require_for(command, config, active->inputs);
  } catch (const rrf::Error& e) {
    return fail(kConfigError, e.kind(), e.what());
  }

  try {
    if (command == "sample-env") rrf::cli::cmd_sample_env(config);
    else if (command == "run") rrf::cli::cmd_run(config);
    else if (command == "analyze") rrf::cli::cmd_analyze(config, active->inputs);
    else rrf::cli::cmd_report(config);
  } catch (const rrf::ConfigError& e) {
    return fail(kConfigError, e.kind(), e.what());
  } catch (const rrf::Error& e) {
    return fail(kRuntimeError, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(kRuntimeError, "exception", e.what());
  }
  return 0;
}
