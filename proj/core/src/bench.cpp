#include "glyphlab/instrumentation.hpp"
#include "glyphlab/pipeline.hpp"

namespace glyphlab {

namespace {

// direct-prompt generation metrics over n seeded samples
BenchRow direct_prompt_row(const ConceptWorld& world, const Predictor& predictor,
                           const ConceptId& target, const std::string& setting,
                           const NoiseSchedule& schedule, double w,
                           std::uint64_t master_seed, int n) {
  BenchRow row;
  row.concept_id = target;
  row.setting = setting;
  row.n = n;
  double acc = 0.0, sim = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(master_seed, "bench-" + setting,
                        static_cast<std::uint64_t>(i)));
    const Vec x = sample_reverse(predictor,
                                 static_cast<std::size_t>(world.dimension()),
                                 ConditionRef::of(target), schedule, w, rng);
    if (classify_top1(world, x) == target) acc += 1.0;
    sim += prototype_similarity(world, x, target);
  }
  row.acc = acc / static_cast<double>(n);
  row.similarity = sim / static_cast<double>(n);
  return row;
}

}  // namespace

BenchTable benchmark_awaken(const ConceptWorld& world, const Predictor& original,
                            const Predictor& erased,
                            const std::vector<ConceptId>& erased_set,
                            const ConceptId& target,
                            const KnowledgeSource& knowledge,
                            const NoiseSchedule& schedule,
                            const PipelineParams& pipeline_params,
                            const BenchParams& bench_params) {
  const int n = bench_params.samples_per_concept;
  if (n < 1) throw std::invalid_argument("benchmark_awaken: sample count must be >= 1");

  BenchTable table;
  table.rows.push_back(direct_prompt_row(world, original, target, "original",
                                         schedule, pipeline_params.w,
                                         bench_params.master_seed, n));
  table.rows.push_back(direct_prompt_row(world, erased, target, "erased",
                                         schedule, pipeline_params.w,
                                         bench_params.master_seed, n));

  // one pipeline run (with its own derived master seed) per sample; each
  // contributes its selected outputs
  BenchRow aw;
  aw.concept_id = target;
  aw.setting = "awakened";
  double acc = 0.0, sim = 0.0;
  int counted = 0;
  for (int i = 0; i < n; ++i) {
    PipelineParams pp = pipeline_params;
    pp.master_seed = derive_seed(bench_params.master_seed, "bench-awaken",
                                 static_cast<std::uint64_t>(i));
    const AwakenReport rep = pipeline_run(world, erased, erased_set, target,
                                          knowledge, pp, schedule);
    if (rep.selected.empty()) {
      if (bench_params.count_failures_as_misses) {
        counted += 1;  // a run with no output is a miss
        sim += 0.0;
      }
      continue;
    }
    for (const auto& s : rep.selected) {
      counted += 1;
      if (classify_top1(world, s.candidate.image) == target) acc += 1.0;
      sim += prototype_similarity(world, s.candidate.image, target);
    }
  }
  aw.n = counted;
  aw.acc = counted > 0 ? acc / static_cast<double>(counted) : 0.0;
  aw.similarity = counted > 0 ? sim / static_cast<double>(counted) : 0.0;
  table.rows.push_back(aw);
  return table;
}

}  // namespace glyphlab
