#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rrf/engine.hpp"
#include "rrf/line_process.hpp"
#include "rrf/scattering.hpp"

namespace rrf {

/// printf "%.17g": enough digits to round-trip any binary64.
std::string format_double(double x);

/// FNV-1a 64 over raw bytes, printed as 16 hex digits in manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);

// Environment files are line-delimited JSON. The first record is the header
//   {"schema":"rrf-environment/1","gamma":..,"v_min":..,"R":..,"seed":..,
//    "count":..,"layers":[{"v_floor":..,"v_ceiling":..,"seed":..,"first_id":..}]}
// followed by one {"id","theta","r","v","orient"} record per line.
void write_environment(std::ostream& out, const Environment& env);
Environment read_environment(std::istream& in);
void save_environment(const std::string& path, const Environment& env);
Environment load_environment(const std::string& path);

struct TrajectoryHeader {
  Mode mode = Mode::Annealed;
  double gamma = 2.5;
  double alpha = 3.0;
  double v_min = 0.0;  // 0 for annealed runs
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::size_t n_steps = 0;  // requested length
};

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

// Trajectory files are CSV behind a one-line "# {json header}" comment.
// Columns: step,prev_id,cur_id,x,y,u,phi,d,t,log_v,censored. Row 0 is the
// initial state with zero step fields; a censored tail is a final row with
// censored=1 whose x,y is the exit point.
void write_trajectory(std::ostream& out, const TrajectoryHeader& header,
                      const Trajectory& traj);

struct LoadedTrajectory {
  TrajectoryHeader header;
  Trajectory traj;
};
LoadedTrajectory read_trajectory(std::istream& in);
LoadedTrajectory load_trajectory(const std::string& path);

// Scatter fixtures: {"classes":[{"kappa":k,"order":[ids]}],"pairs":[[a,b],...]}.
ScatterInstance read_scatter_instance(std::istream& in);
ScatterInstance load_scatter_instance(const std::string& path);
std::string scatter_instance_json(const ScatterInstance& instance);

}  // namespace rrf
