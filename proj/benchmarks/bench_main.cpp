#include <benchmark/benchmark.h>

#include <cmath>

#include "rrf/engine.hpp"
#include "rrf/line_process.hpp"
#include "rrf/scattering.hpp"

using namespace rrf;

namespace {

const Environment& shared_env() {
  static const Environment env = sample_environment({2.5, 0.01, 150.0, 1});
  return env;
}

void BM_SampleEnvironment(benchmark::State& state) {
  const double v_min = 1.0 / static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_environment({2.5, v_min, 150.0, ++seed}).size());
  }
  state.counters["lines"] = expected_count(2.5, v_min, 150.0);
}
BENCHMARK(BM_SampleEnvironment)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AnnealedStep(benchmark::State& state) {
  const LawParams law(2.5, 3.0);
  Rng rng(1);
  double log_v = 0.0;
  for (auto _ : state) {
    const StepRecord r = step_annealed(law, log_v, rng);
    log_v += r.u;
    benchmark::DoNotOptimize(log_v);
  }
}
BENCHMARK(BM_AnnealedStep);

void BM_QuenchedStep(benchmark::State& state) {
  const Environment& env = shared_env();
  Rng palm(2), walk(3);
  const RRFState start = *palm_select(env, 1.0, 3.0, palm);
  RRFState s = start;
  for (auto _ : state) {
    const QuenchedStep step = step_quenched(env, s, 3.0, walk);
    s = step.next ? *step.next : start;
    benchmark::DoNotOptimize(s.log_v);
  }
}
BENCHMARK(BM_QuenchedStep);

void BM_ThinnedQuery(benchmark::State& state) {
  const Environment& env = shared_env();
  Rng rng(4);
  std::size_t id = 0;
  for (auto _ : state) {
    id = (id + 7919) % env.size();
    const double h = env.half_chord(id);
    benchmark::DoNotOptimize(
        env.thinned_crossings_in_segment(id, -h, h, env.line(id).v, 3.0, id, rng).size());
  }
}
BENCHMARK(BM_ThinnedQuery);

void BM_BuildMh(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  // Two classes of k states, paired in order.
  std::vector<StateId> twin(2 * k);
  std::vector<ScatterClass> classes{{1.0, {}}, {3.0, {}}};
  for (std::size_t i = 0; i < k; ++i) {
    twin[i] = k + i;
    twin[k + i] = i;
    classes[0].order.push_back(i);
    classes[1].order.push_back(k + i);
  }
  const ScatterInstance inst = with_boundary_caps(ScatterInstance(twin, classes));
  for (auto _ : state) {
    const ScatterRepresentation rep = build_mh(inst);
    benchmark::DoNotOptimize(transition_matrix(rep).p.data());
  }
}
BENCHMARK(BM_BuildMh)->Arg(4)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
