#include "rrf/line_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rrf/errors.hpp"
#include "rrf/random.hpp"

namespace rrf {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 1.0)) {
    throw DomainError("gamma must exceed 1 (got " + std::to_string(gamma) + ")");
  }
}

// Range of f(theta) = n(theta) . p over theta in [a, b] where
// f = |p| cos(theta - beta).
struct SinusoidRange {
  double lo, hi;
};

bool contains_angle(double target, double a, double width) {
  const double t = std::fmod(std::fmod(target - a, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi);
  return t <= width;
}

}  // namespace

// Lines are split into dyadic speed bands above the floor. Within a band they
// are bucketed by angle and sorted by r inside each bucket, so the lines
// crossing a segment form one contiguous r-range per bucket (a superset: the
// range bounds the sinusoid r = n(theta).p over the whole bucket).
struct Band {
  double v_lo = 0.0;
  double v_hi = 0.0;
  std::size_t buckets = 1;
  double width = kPi;
  std::vector<std::size_t> offsets;  // buckets + 1
  std::vector<double> r_sorted;
  std::vector<std::uint32_t> ids;
  std::vector<Vec2> edge_normals;  // buckets + 1

  std::size_t bucket_of(double theta) const {
    return std::min(buckets - 1, static_cast<std::size_t>(theta / width));
  }

  void build(std::span<const Line> lines, std::vector<std::uint32_t> members) {
    const auto n = members.size();
    buckets = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(2.0 * std::sqrt(static_cast<double>(n)))),
        1, 16384);
    width = kPi / static_cast<double>(buckets);
    offsets.assign(buckets + 1, 0);
    for (auto i : members) ++offsets[bucket_of(lines[i].theta) + 1];
    for (std::size_t k = 0; k < buckets; ++k) offsets[k + 1] += offsets[k];
    ids.resize(n);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (auto i : members) ids[fill[bucket_of(lines[i].theta)]++] = i;
    for (std::size_t k = 0; k < buckets; ++k) {
      std::sort(ids.begin() + static_cast<std::ptrdiff_t>(offsets[k]),
                ids.begin() + static_cast<std::ptrdiff_t>(offsets[k + 1]),
                [&](std::uint32_t a, std::uint32_t b) {
                  if (lines[a].r != lines[b].r) return lines[a].r < lines[b].r;
                  return a < b;
                });
    }
    r_sorted.resize(n);
    for (std::size_t i = 0; i < n; ++i) r_sorted[i] = lines[ids[i]].r;
    edge_normals.resize(buckets + 1);
    for (std::size_t k = 0; k <= buckets; ++k) {
      const double t = static_cast<double>(k) * width;
      edge_normals[k] = {-std::sin(t), std::cos(t)};
    }
  }

  SinusoidRange range(Vec2 p, double beta, std::size_t k) const {
    const double fa = dot(edge_normals[k], p);
    const double fb = dot(edge_normals[k + 1], p);
    SinusoidRange out{std::min(fa, fb), std::max(fa, fb)};
    const double m = norm(p);
    const double a = static_cast<double>(k) * width;
    if (contains_angle(beta, a, width)) out.hi = m;
    if (contains_angle(beta + kPi, a, width)) out.lo = -m;
    return out;
  }

  // Calls visit(first, last) with the candidate index range of each bucket.
  template <class Visit>
  void candidates(Vec2 p, Vec2 q, Visit&& visit) const {
    if (r_sorted.empty()) return;
    const double beta_p = std::atan2(-p.x, p.y);
    const double beta_q = std::atan2(-q.x, q.y);
    for (std::size_t k = 0; k < buckets; ++k) {
      const auto begin = r_sorted.begin() + static_cast<std::ptrdiff_t>(offsets[k]);
      const auto end = r_sorted.begin() + static_cast<std::ptrdiff_t>(offsets[k + 1]);
      if (begin == end) continue;
      const SinusoidRange rp = range(p, beta_p, k);
      const SinusoidRange rq = range(q, beta_q, k);
      const auto first = std::lower_bound(begin, end, std::min(rp.lo, rq.lo));
      const auto last = std::upper_bound(first, end, std::max(rp.hi, rq.hi));
      if (first != last) {
        visit(static_cast<std::size_t>(first - r_sorted.begin()),
              static_cast<std::size_t>(last - r_sorted.begin()));
      }
    }
  }
};

struct Environment::Index {
  std::vector<Band> bands;

  Index(std::span<const Line> lines, double v_min) {
    std::vector<std::vector<std::uint32_t>> members;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const double ratio = lines[i].v / v_min;
      std::size_t k = 0;
      if (ratio >= 2.0) {
        k = static_cast<std::size_t>(std::floor(std::log2(ratio)));
        // Guard the rounding of log2 at band edges.
        while (k > 0 && std::ldexp(v_min, static_cast<int>(k)) > lines[i].v) --k;
        while (std::ldexp(v_min, static_cast<int>(k + 1)) <= lines[i].v) ++k;
      }
      if (k >= members.size()) members.resize(k + 1);
      members[k].push_back(static_cast<std::uint32_t>(i));
    }
    bands.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      bands[k].v_lo = std::ldexp(v_min, static_cast<int>(k));
      bands[k].v_hi = k + 1 == members.size() ? std::numeric_limits<double>::infinity()
                                              : std::ldexp(v_min, static_cast<int>(k + 1));
      bands[k].build(lines, std::move(members[k]));
    }
  }
};

Environment::Environment(EnvironmentParams params, std::vector<Line> lines,
                         std::vector<Layer> layers)
    : params_(params), layers_(std::move(layers)) {
  require_gamma(params_.gamma);
  if (!(params_.v_min > 0.0)) throw DomainError("v_min must be positive");
  if (!(params_.radius > 0.0)) throw DomainError("window radius must be positive");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (!(l.theta >= 0.0 && l.theta < kPi) || !(std::abs(l.r) < params_.radius) ||
        !(l.v >= params_.v_min) || (l.orient != 1 && l.orient != -1)) {
      throw DomainError("environment line " + std::to_string(i) +
                        " violates the window or speed floor");
    }
  }
  if (lines.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("environment too large for the crossing index");
  }
  lines_ = std::make_shared<const std::vector<Line>>(std::move(lines));
  index_ = std::make_shared<const Index>(*lines_, params_.v_min);
}

const Line& Environment::line(std::size_t id) const {
  if (id >= lines_->size()) {
    throw InvalidState("line id " + std::to_string(id) + " out of range");
  }
  return (*lines_)[id];
}

double Environment::half_chord(std::size_t id) const {
  const double r = line(id).r;
  return std::sqrt(std::max(0.0, params_.radius * params_.radius - r * r));
}

std::vector<Crossing> Environment::crossings_in_segment(std::size_t id, double s_lo,
                                                        double s_hi) const {
  const Line& base = line(id);
  const double h = half_chord(id);
  s_lo = std::max(s_lo, -h);
  s_hi = std::min(s_hi, h);
  std::vector<Crossing> out;
  if (!(s_lo <= s_hi)) return out;
  const Vec2 p = base.point_at(s_lo);
  const Vec2 q = base.point_at(s_hi);
  const auto& lines = *lines_;
  for (const Band& band : index_->bands) {
    band.candidates(p, q, [&](std::size_t first, std::size_t last) {
      for (std::size_t j = first; j < last; ++j) {
        const std::size_t other = band.ids[j];
        if (other == id || lines[other].theta == base.theta) continue;
        const LineCross c = intersect(base, lines[other]);
        if (c.s_on_first >= s_lo && c.s_on_first <= s_hi) out.push_back({other, c});
      }
    });
  }
  return out;
}

std::vector<Crossing> Environment::thinned_crossings_in_segment(
    std::size_t id, double s_lo, double s_hi, double v_ref, double alpha,
    std::size_t exclude, Rng& rng) const {
  const Line& base = line(id);
  if (!(v_ref > 0.0) || !(alpha > 0.0)) {
    throw DomainError("thinned crossings: v_ref and alpha must be positive");
  }
  const double h = half_chord(id);
  s_lo = std::max(s_lo, -h);
  s_hi = std::min(s_hi, h);
  std::vector<Crossing> out;
  if (!(s_lo <= s_hi)) return out;
  const Vec2 p = base.point_at(s_lo);
  const Vec2 q = base.point_at(s_hi);
  const auto& lines = *lines_;
  auto keep = [&](std::size_t other, double bound) {
    if (other == id || other == exclude || lines[other].theta == base.theta) return;
    const LineCross c = intersect(base, lines[other]);
    if (!(c.s_on_first >= s_lo && c.s_on_first <= s_hi)) return;
    const double v = lines[other].v;
    const double prob = v >= v_ref ? 1.0 : std::pow(v / v_ref, alpha);
    if (prob >= bound || rng.uniform() * bound < prob) out.push_back({other, c});
  };
  for (const Band& band : index_->bands) {
    const double bound = band.v_hi >= v_ref ? 1.0 : std::pow(band.v_hi / v_ref, alpha);
    if (bound >= 1.0) {
      band.candidates(p, q, [&](std::size_t first, std::size_t last) {
        for (std::size_t j = first; j < last; ++j) keep(band.ids[j], 1.0);
      });
      continue;
    }
    // Each candidate is proposed independently with probability `bound` by
    // geometric skipping, then kept with probability prob / bound.
    const double log_miss = std::log1p(-bound);
    auto skip = [&] {
      return static_cast<double>(std::floor(std::log(rng.uniform_open()) / log_miss));
    };
    double next = skip();
    band.candidates(p, q, [&](std::size_t first, std::size_t last) {
      const double len = static_cast<double>(last - first);
      while (next < len) {
        keep(band.ids[first + static_cast<std::size_t>(next)], bound);
        next += 1.0 + skip();
      }
      next -= len;
    });
  }
  return out;
}

double expected_count(double gamma, double v_min, double radius) {
  require_gamma(gamma);
  if (!(v_min > 0.0) || !(radius > 0.0)) {
    throw DomainError("expected_count: v_min and radius must be positive");
  }
  if (std::isinf(v_min)) return 0.0;
  return kPi * radius * std::pow(v_min, 1.0 - gamma);
}

double speed_from_uniform(double gamma, double v_min, double u) {
  return v_min * std::pow(1.0 - u, -1.0 / (gamma - 1.0));
}

double band_speed_from_uniform(double gamma, double v_floor, double v_ceiling, double u) {
  const double ratio = std::pow(v_ceiling / v_floor, 1.0 - gamma);
  const double v = v_floor * std::pow(1.0 - u * (1.0 - ratio), 1.0 / (1.0 - gamma));
  return std::min(v, std::nextafter(v_ceiling, 0.0));
}

Environment sample_environment(const EnvironmentParams& params,
                               const SamplingLimits& limits) {
  const double mean = expected_count(params.gamma, params.v_min, params.radius);
  if (mean > limits.max_expected_lines) {
    throw ResourceError("expected line count " + std::to_string(mean) +
                        " exceeds the configured cap");
  }
  Rng rng(params.seed, 0, "environment");
  const auto count = rng.poisson(mean);
  std::vector<Line> lines;
  lines.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    Line l;
    l.theta = fold_pi(kPi * rng.uniform());
    l.r = params.radius * (2.0 * rng.uniform_open() - 1.0);
    l.v = speed_from_uniform(params.gamma, params.v_min, rng.uniform());
    l.orient = rng.sign();
    lines.push_back(l);
  }
  return Environment(params, std::move(lines));
}

Environment splice_inner_disk(const Environment& inner, const Environment& outer,
                              double c) {
  if (inner.gamma() != outer.gamma() || inner.v_min() != outer.v_min()) {
    throw DomainError("splice_inner_disk: environments differ in gamma or speed floor");
  }
  if (!(c > 0.0) || c > outer.radius()) {
    throw DomainError("splice_inner_disk: c must lie in (0, outer radius]");
  }
  std::vector<Line> lines(inner.lines().begin(), inner.lines().end());
  for (const Line& l : lines) {
    if (!(std::abs(l.r) < c)) throw DomainError("splice_inner_disk: inner line outside c");
  }
  for (const Line& l : outer.lines()) {
    if (std::abs(l.r) >= c) lines.push_back(l);
  }
  return Environment(outer.params(), std::move(lines));
}

Environment refine_environment(const Environment& env, double v_min_new,
                               std::uint64_t layer_seed, const SamplingLimits& limits) {
  const double v_old = env.v_min();
  if (!(v_min_new > 0.0) || !(v_min_new < v_old)) {
    throw DomainError("refine_environment: need 0 < v_min_new < current v_min");
  }
  const double gamma = env.gamma();
  const double mean = kPi * env.radius() *
                      (std::pow(v_min_new, 1.0 - gamma) - std::pow(v_old, 1.0 - gamma));
  if (static_cast<double>(env.size()) + mean > limits.max_expected_lines) {
    throw ResourceError("refined environment would exceed the configured line cap");
  }
  Rng rng(layer_seed, 0, "refine-layer");
  const auto count = rng.poisson(mean);
  std::vector<Line> lines(env.lines().begin(), env.lines().end());
  lines.reserve(lines.size() + static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    Line l;
    l.theta = fold_pi(kPi * rng.uniform());
    l.r = env.radius() * (2.0 * rng.uniform_open() - 1.0);
    l.v = band_speed_from_uniform(gamma, v_min_new, v_old, rng.uniform());
    l.orient = rng.sign();
    lines.push_back(l);
  }
  std::vector<Layer> layers(env.layers().begin(), env.layers().end());
  layers.push_back({v_min_new, v_old, layer_seed, env.size()});
  EnvironmentParams params = env.params();
  params.v_min = v_min_new;
  return Environment(params, std::move(lines), std::move(layers));
}

std::vector<Crossing> crossings_along(const Environment& env, std::size_t id,
                                      double from_s, int dir) {
  const Line& base = env.line(id);
  std::vector<std::pair<double, Crossing>> found;
  const auto lines = env.lines();
  for (std::size_t j = 0; j < lines.size(); ++j) {
    if (j == id || lines[j].theta == base.theta) continue;
    const LineCross c = intersect(base, lines[j]);
    const double ahead = static_cast<double>(dir) * (c.s_on_first - from_s);
    if (ahead > 0.0) found.push_back({ahead, {j, c}});
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.other < b.second.other;
  });
  std::vector<Crossing> out;
  out.reserve(found.size());
  for (auto& f : found) out.push_back(f.second);
  return out;
}

}  // namespace rrf
