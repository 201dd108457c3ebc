#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "rrf/errors.hpp"
#include "rrf/io.hpp"

namespace rrf::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw ResourceError("cannot write " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_file(c.out, text);
  }
}

std::string replica_file(std::size_t r) {
  char name[32];
  std::snprintf(name, sizeof name, "replica_%05zu.csv", r);
  return name;
}

double lowest_floor(const RunConfig& c) { return c.refine_to.value_or(c.v_min); }

}  // namespace

void require_for(const std::string& command, const RunConfig& c,
                 const std::vector<std::string>& inputs) {
  if (command != "analyze" && !c.seed) throw ConfigError("seed is mandatory");
  if (command == "sample-env" && c.out.empty()) {
    throw ConfigError("sample-env needs --out");
  }
  if (command == "run" && c.out_dir.empty()) throw ConfigError("run needs --out-dir");
  if (command == "analyze" && inputs.empty() && c.manifest.empty()) {
    throw ConfigError("analyze needs trajectory files or --manifest");
  }
  if (command == "report" && c.sensitivity_v_min && c.mode != Mode::Quenched) {
    throw ConfigError("sensitivity_v_min applies to quenched runs only");
  }
  if ((command == "run" || command == "report") && c.mode == Mode::Quenched &&
      c.env_file.empty() && c.palm_c >= c.R) {
    throw ConfigError("palm_c must be smaller than R");
  }
}

void cmd_sample_env(const RunConfig& c) {
  const Environment env = sample_environment({c.gamma, c.v_min, c.R, *c.seed});
  std::ostringstream ss;
  write_environment(ss, env);
  emit(c, ss.str());
}

void cmd_run(const RunConfig& c) {
  BatchConfig batch = batch_of(c);
  ordered_json env_info = nullptr;
  if (c.mode == Mode::Quenched && !c.env_file.empty()) {
    const std::string bytes = read_file(c.env_file);
    std::istringstream in(bytes);
    auto env = std::make_shared<Environment>(read_environment(in));
    if (env->gamma() != c.gamma) {
      throw ConfigError("environment file has gamma " + format_double(env->gamma()));
    }
    env_info = {{"fnv1a64", hex64(fnv1a64(bytes))}, {"lines", env->size()}};
    batch.environment = std::move(env);
  }
  const RunMeta meta = meta_of(batch);
  const std::vector<ReplicaRun> runs = run_batch(batch);

  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  ordered_json replicas = ordered_json::array();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    TrajectoryHeader h{meta.mode, meta.gamma,     meta.alpha, meta.v_min,
                       meta.radius, meta.seed, r,         meta.n_steps};
    std::ostringstream ss;
    write_trajectory(ss, h, runs[r].traj);
    const std::string bytes = ss.str();
    write_file(dir / replica_file(r), bytes);
    replicas.push_back({{"replica", r},
                        {"file", replica_file(r)},
                        {"fnv1a64", hex64(fnv1a64(bytes))},
                        {"steps", runs[r].traj.steps()},
                        {"censored", runs[r].traj.censored()},
                        {"gave_up", runs[r].traj.gave_up},
                        {"env_lines", runs[r].env_lines},
                        {"palm_attempts", runs[r].palm_attempts}});
  }
  ordered_json manifest;
  manifest["schema"] = "rrf-manifest/1";
  manifest["params"] = {{"mode", std::string(mode_name(meta.mode))},
                        {"gamma", meta.gamma},
                        {"alpha", meta.alpha},
                        {"v_min", meta.v_min},
                        {"R", meta.radius},
                        {"seed", meta.seed},
                        {"seed_derivation", "derive_seed(seed, replica, purpose)"},
                        {"n_steps", meta.n_steps},
                        {"n_replicas", c.n_replicas},
                        {"log_v0", c.log_v0},
                        {"palm_c", c.palm_c},
                        {"resample_cap", c.resample_cap},
                        {"environment", env_info}};
  manifest["replicas"] = std::move(replicas);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void cmd_analyze(const RunConfig& c, const std::vector<std::string>& inputs) {
  std::vector<std::string> files = inputs;
  if (!c.manifest.empty()) {
    const fs::path base = fs::path(c.manifest).parent_path();
    ordered_json manifest;
    try {
      manifest = ordered_json::parse(read_file(c.manifest));
      if (manifest.at("schema") != "rrf-manifest/1") throw SchemaError("not a manifest");
      for (const auto& r : manifest.at("replicas")) {
        files.push_back((base / r.at("file").get<std::string>()).string());
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("manifest " + c.manifest + ": " + e.what());
    }
  }
  if (files.empty()) throw EmptySample("analyze: no trajectories");

  std::vector<Trajectory> trajs;
  std::optional<TrajectoryHeader> first;
  for (const auto& f : files) {
    LoadedTrajectory lt = load_trajectory(f);
    const TrajectoryHeader& h = lt.header;
    if (!first) {
      first = h;
    } else if (h.mode != first->mode || h.gamma != first->gamma || h.alpha != first->alpha ||
               h.v_min != first->v_min || h.radius != first->radius ||
               h.seed != first->seed || h.n_steps != first->n_steps) {
      throw ConfigError("trajectory " + f + " was produced with different parameters");
    }
    trajs.push_back(std::move(lt.traj));
  }
  if ((c.is_explicit("gamma") && c.gamma != first->gamma) ||
      (c.is_explicit("alpha") && c.alpha != first->alpha)) {
    throw ConfigError("trajectories were produced with gamma=" + format_double(first->gamma) +
                      ", alpha=" + format_double(first->alpha));
  }
  const RunMeta meta{first->mode, first->gamma, first->alpha, first->v_min,
                     first->radius, first->seed, first->n_steps};
  const ExperimentReport report = analyze(meta, trajs, analysis_of(c));
  if (!c.plot_dir.empty()) {
    fs::create_directories(c.plot_dir);
    write_plot_data(c.plot_dir, report, trajs);
  }
  emit(c, report_json(report));
}

void cmd_report(const RunConfig& c) {
  BatchConfig batch = batch_of(c);
  if (c.mode == Mode::Quenched && !c.env_file.empty()) {
    auto env = std::make_shared<Environment>(load_environment(c.env_file));
    if (env->gamma() != c.gamma) {
      throw ConfigError("environment file has gamma " + format_double(env->gamma()));
    }
    batch.environment = std::move(env);
  }

  std::optional<Calibration> calibration;
  if (c.calibrate_target) {
    const LawParams law(c.gamma, c.alpha);
    const double log_v0 = c.mode == Mode::Quenched ? std::log(c.palm_c) : c.log_v0;
    calibration = calibrate_radius(law, log_v0, c.n_steps, *c.calibrate_target,
                                   c.calibrate_samples, *c.seed);
    calibration->line_budget = c.line_budget;
    calibration->radius_used = calibration->radius_needed;
    if (c.mode == Mode::Quenched) {
      if (batch.environment) {
        calibration->radius_used = batch.environment->radius();
      } else {
        const double per_unit = expected_count(c.gamma, lowest_floor(c), 1.0);
        calibration->radius_used =
            std::min(calibration->radius_needed, c.line_budget / per_unit);
        calibration->radius_used = std::max(calibration->radius_used, 2.0 * c.palm_c);
        batch.radius = calibration->radius_used;
      }
    }
  }

  const std::vector<ReplicaRun> runs = run_batch(batch);
  std::vector<Trajectory> trajs;
  for (const auto& r : runs) trajs.push_back(r.traj);
  const AnalysisConfig analysis = analysis_of(c);
  ExperimentReport report = analyze(meta_of(batch), trajs, analysis);

  if (c.sensitivity_v_min) {
    BatchConfig low = batch;
    low.refine_to = *c.sensitivity_v_min;
    std::vector<Trajectory> low_trajs;
    for (const auto& r : run_batch(low)) low_trajs.push_back(r.traj);
    attach_sensitivity(report, analyze(meta_of(low), low_trajs, analysis));
  }
  report.calibration = calibration;

  if (!c.plot_dir.empty()) {
    fs::create_directories(c.plot_dir);
    write_plot_data(c.plot_dir, report, trajs);
  }
  emit(c, report_json(report));
}

}  // namespace rrf::cli
