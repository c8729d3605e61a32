#include <benchmark/benchmark.h>

#include "glyphlab/erasure.hpp"
#include "glyphlab/instrumentation.hpp"
#include "glyphlab/pipeline.hpp"
#include "glyphlab/preset.hpp"
#include "glyphlab/sampler.hpp"

using namespace glyphlab;

namespace {

struct Lab {
  ConceptWorld world = well_separated_world();
  NoiseSchedule sched = make_linear_schedule(100, 1e-4, 0.02);
  PredictorPtr base = world_predictor(world);
};

Lab& lab() {
  static Lab instance;
  return instance;
}

}  // namespace

static void BM_true_eps_mixture(benchmark::State& state) {
  auto& l = lab();
  Rng rng(1);
  State st;
  st.t = 70;
  st.x = rng.normal_vec((size_t)l.world.dimension());
  for (auto _ : state) {
    benchmark::DoNotOptimize(true_eps(l.world, st, ConditionRef::null(), l.sched));
  }
}
BENCHMARK(BM_true_eps_mixture);

static void BM_reverse_step(benchmark::State& state) {
  auto& l = lab();
  Rng rng(2);
  State st;
  st.t = 70;
  st.x = rng.normal_vec((size_t)l.world.dimension());
  const Vec noise = rng.normal_vec(st.x.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reverse_step(*l.base, st, ConditionRef::of("ruby_disk"), l.sched, noise, 7.5));
  }
}
BENCHMARK(BM_reverse_step);

static void BM_conditional_sample(benchmark::State& state) {
  auto& l = lab();
  std::uint64_t seed = 3;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(sample_reverse(
        *l.base, (size_t)l.world.dimension(), ConditionRef::of("ruby_disk"),
        l.sched, 7.5, rng));
  }
}
BENCHMARK(BM_conditional_sample)->Unit(benchmark::kMillisecond);

static void BM_trajectory_record(benchmark::State& state) {
  auto& l = lab();
  std::uint64_t seed = 4;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(record_trajectory(*l.base,
                                               ConditionRef::of("ruby_disk"),
                                               l.world, l.sched, 7.5, rng,
                                               {.xhat0_posterior = false}));
  }
}
BENCHMARK(BM_trajectory_record)->Unit(benchmark::kMillisecond);

static void BM_pipeline_smoke(benchmark::State& state) {
  auto& l = lab();
  const PredictorPtr erased = erase_redirect(l.base, "ruby_disk");
  const auto knowledge = make_table_knowledge(l.world);
  std::uint64_t seed = 5;
  for (auto _ : state) {
    PipelineParams pp;
    pp.K = 2;
    pp.J = 1;
    pp.N = 1;
    pp.master_seed = seed++;
    benchmark::DoNotOptimize(pipeline_run(l.world, *erased, {"ruby_disk"},
                                          "ruby_disk", *knowledge, pp, l.sched));
  }
}
BENCHMARK(BM_pipeline_smoke)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
