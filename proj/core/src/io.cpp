#include "rrf/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "rrf/errors.hpp"

namespace rrf {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

namespace {

template <class T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path);
  return in;
}

double parse_double(const std::string& cell) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
    throw SchemaError("bad number '" + cell + "'");
  }
  return x;
}

std::int64_t parse_int(const std::string& cell) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(cell.c_str(), &end, 10);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
    throw SchemaError("bad integer '" + cell + "'");
  }
  return x;
}

}  // namespace

void write_environment(std::ostream& out, const Environment& env) {
  out << "{\"schema\":\"rrf-environment/1\",\"gamma\":" << format_double(env.gamma())
      << ",\"v_min\":" << format_double(env.v_min())
      << ",\"R\":" << format_double(env.radius()) << ",\"seed\":" << env.seed()
      << ",\"count\":" << env.size() << ",\"layers\":[";
  bool first = true;
  for (const auto& layer : env.layers()) {
    if (!first) out << ',';
    first = false;
    out << "{\"v_floor\":" << format_double(layer.v_floor)
        << ",\"v_ceiling\":" << format_double(layer.v_ceiling)
        << ",\"seed\":" << layer.seed << ",\"first_id\":" << layer.first_id << '}';
  }
  out << "]}\n";
  const auto lines = env.lines();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    out << "{\"id\":" << i << ",\"theta\":" << format_double(l.theta)
        << ",\"r\":" << format_double(l.r) << ",\"v\":" << format_double(l.v)
        << ",\"orient\":" << l.orient << "}\n";
  }
}

Environment read_environment(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw SchemaError("environment file is empty");
  const json header = parse_json(text, "environment header");
  if (field<std::string>(header, "schema") != "rrf-environment/1") {
    throw SchemaError("not an environment file");
  }
  EnvironmentParams params;
  params.gamma = field<double>(header, "gamma");
  params.v_min = field<double>(header, "v_min");
  params.radius = field<double>(header, "R");
  params.seed = field<std::uint64_t>(header, "seed");
  const auto count = field<std::size_t>(header, "count");
  std::vector<Layer> layers;
  for (const auto& l : field<json>(header, "layers")) {
    layers.push_back({field<double>(l, "v_floor"), field<double>(l, "v_ceiling"),
                      field<std::uint64_t>(l, "seed"), field<std::size_t>(l, "first_id")});
  }
  std::vector<Line> lines;
  lines.reserve(count);
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    const json rec = parse_json(text, "environment record");
    if (field<std::size_t>(rec, "id") != lines.size()) {
      throw SchemaError("environment records out of order");
    }
    lines.push_back({field<double>(rec, "theta"), field<double>(rec, "r"),
                     field<double>(rec, "v"), field<int>(rec, "orient")});
  }
  if (lines.size() != count) throw SchemaError("environment line count mismatch");
  return Environment(params, std::move(lines), std::move(layers));
}

void save_environment(const std::string& path, const Environment& env) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path);
  write_environment(out, env);
}

Environment load_environment(const std::string& path) {
  auto in = open_in(path);
  return read_environment(in);
}

std::string_view mode_name(Mode mode) {
  return mode == Mode::Quenched ? "quenched" : "annealed";
}

Mode parse_mode(std::string_view name) {
  if (name == "quenched") return Mode::Quenched;
  if (name == "annealed") return Mode::Annealed;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

void write_trajectory(std::ostream& out, const TrajectoryHeader& h, const Trajectory& traj) {
  out << "# {\"schema\":\"rrf-trajectory/1\",\"mode\":\"" << mode_name(h.mode)
      << "\",\"gamma\":" << format_double(h.gamma)
      << ",\"alpha\":" << format_double(h.alpha)
      << ",\"v_min\":" << format_double(h.v_min) << ",\"R\":" << format_double(h.radius)
      << ",\"seed\":" << h.seed << ",\"replica\":" << h.replica << ",\"n_steps\":" << h.n_steps
      << ",\"gave_up\":" << (traj.gave_up ? "true" : "false") << "}\n";
  out << "step,prev_id,cur_id,x,y,u,phi,d,t,log_v,censored\n";
  if (traj.gave_up) return;
  auto row = [&](std::size_t step, std::size_t k, const StepRecord* rec, Vec2 p,
                 bool censored) {
    out << step << ',' << traj.prev_id[k] << ',' << traj.cur_id[k] << ','
        << format_double(p.x) << ',' << format_double(p.y) << ','
        << format_double(rec ? rec->u : 0.0) << ',' << format_double(rec ? rec->phi : 0.0)
        << ',' << format_double(rec ? rec->d : 0.0) << ','
        << format_double(rec ? rec->t : 0.0) << ',' << format_double(traj.log_v[k]) << ','
        << (censored ? 1 : 0) << '\n';
  };
  row(0, 0, nullptr, traj.position[0], false);
  for (std::size_t k = 1; k < traj.log_v.size(); ++k) {
    row(k, k, &traj.records[k - 1], traj.position[k], false);
  }
  if (traj.censored_tail) {
    const std::size_t last = traj.log_v.size() - 1;
    row(last + 1, last, &*traj.censored_tail, traj.exit_point, true);
  }
}

LoadedTrajectory read_trajectory(std::istream& in) {
  std::string text;
  if (!std::getline(in, text) || text.rfind("# ", 0) != 0) {
    throw SchemaError("trajectory file lacks its header comment");
  }
  const json j = parse_json(text.substr(2), "trajectory header");
  if (field<std::string>(j, "schema") != "rrf-trajectory/1") {
    throw SchemaError("not a trajectory file");
  }
  LoadedTrajectory out;
  TrajectoryHeader& h = out.header;
  h.mode = parse_mode(field<std::string>(j, "mode"));
  h.gamma = field<double>(j, "gamma");
  h.alpha = field<double>(j, "alpha");
  h.v_min = field<double>(j, "v_min");
  h.radius = field<double>(j, "R");
  h.seed = field<std::uint64_t>(j, "seed");
  h.replica = field<std::uint64_t>(j, "replica");
  h.n_steps = field<std::size_t>(j, "n_steps");
  if (!std::getline(in, text) || text != "step,prev_id,cur_id,x,y,u,phi,d,t,log_v,censored") {
    throw SchemaError("unexpected trajectory columns");
  }
  Trajectory& traj = out.traj;
  traj.mode = h.mode;
  traj.gave_up = j.value("gave_up", false);
  std::vector<std::string> cells;
  double t_cont = 0.0;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    if (traj.censored_tail) throw SchemaError("rows after the censored tail");
    cells.clear();
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11) throw SchemaError("trajectory row has the wrong width");
    const auto step = parse_int(cells[0]);
    StepRecord rec{parse_double(cells[5]), parse_double(cells[6]), parse_double(cells[7]),
                   parse_double(cells[8]), cells[10] == "1"};
    const Vec2 p{parse_double(cells[3]), parse_double(cells[4])};
    if (step != static_cast<std::int64_t>(traj.log_v.size())) {
      throw SchemaError("trajectory steps out of order");
    }
    if (rec.censored) {
      traj.censored_tail = rec;
      traj.exit_point = p;
      continue;
    }
    if (step > 0) {
      traj.records.push_back(rec);
      t_cont += rec.t;
    }
    traj.log_v.push_back(parse_double(cells[9]));
    traj.t_cont.push_back(t_cont);
    traj.position.push_back(p);
    traj.prev_id.push_back(parse_int(cells[1]));
    traj.cur_id.push_back(parse_int(cells[2]));
  }
  if (traj.log_v.empty() && !traj.gave_up) {
    throw SchemaError("trajectory has no initial row");
  }
  return out;
}

LoadedTrajectory load_trajectory(const std::string& path) {
  auto in = open_in(path);
  return read_trajectory(in);
}

ScatterInstance read_scatter_instance(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  const json j = parse_json(buf.str(), "scatter instance");
  std::vector<ScatterClass> classes;
  std::size_t n = 0;
  for (const auto& c : field<json>(j, "classes")) {
    classes.push_back({field<double>(c, "kappa"), field<std::vector<StateId>>(c, "order")});
    n += classes.back().order.size();
  }
  std::vector<StateId> twin(n, n);
  for (const auto& pair : field<json>(j, "pairs")) {
    const auto ab = pair.get<std::vector<StateId>>();
    if (ab.size() != 2 || ab[0] >= n || ab[1] >= n) throw SchemaError("bad pair");
    if (twin[ab[0]] != n || twin[ab[1]] != n) throw InvalidInstance("state paired twice");
    twin[ab[0]] = ab[1];
    twin[ab[1]] = ab[0];
  }
  for (StateId a = 0; a < n; ++a) {
    if (twin[a] == n) throw InvalidInstance("state " + std::to_string(a) + " is unpaired");
  }
  return ScatterInstance(std::move(twin), std::move(classes));
}

ScatterInstance load_scatter_instance(const std::string& path) {
  auto in = open_in(path);
  return read_scatter_instance(in);
}

std::string scatter_instance_json(const ScatterInstance& instance) {
  json j;
  j["classes"] = json::array();
  for (const auto& c : instance.classes()) {
    j["classes"].push_back({{"kappa", c.kappa}, {"order", c.order}});
  }
  j["pairs"] = json::array();
  for (StateId a = 0; a < instance.state_count(); ++a) {
    if (a < instance.twin(a)) j["pairs"].push_back({a, instance.twin(a)});
  }
  return j.dump();
}

}  // namespace rrf
