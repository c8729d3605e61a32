#include "glyphlab/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <future>
#include <stdexcept>

#include "glyphlab/csv.hpp"
#include "glyphlab/raster.hpp"
#include "glyphlab/sampler.hpp"
#include "glyphlab/vec.hpp"

namespace glyphlab {

namespace {

// j-th physical-refinement condition: the null condition, the plan's
// context, then the target's own primary context, cycling beyond J = 3
ConditionRef phys_condition(int j, const SurrogatePlan& plan,
                            const ConceptWorld& world, const ConceptId& target) {
  const int slot = (j - 1) % 3;
  if (slot == 0) return ConditionRef::null();
  if (slot == 1) return plan.context_condition;
  for (const auto& tag : world.concept_by_id(target).attributes.contexts) {
    if (world.has_concept(tag)) return ConditionRef::of(tag);
  }
  return ConditionRef::null();
}

struct PlanOutcome {
  std::vector<ScoredCandidate> scored;
  std::vector<StageFailure> failures;
};

PlanOutcome run_plan(const ConceptWorld& world, const Predictor& erased,
                     const std::vector<ConceptId>& erased_set,
                     const ConceptId& target, const SurrogatePlan& plan,
                     const NoiseSchedule& schedule,
                     const RealismReference& realism,
                     const PipelineParams& params) {
  PlanOutcome out;
  const int k = plan.index;
  const GridShape g = *world.glyph_shape();

  StructureMask mask;
  try {
    Rng rng(derive_seed(params.master_seed, "guesser-mask", static_cast<std::uint64_t>(k)));
    mask = build_structure_mask(erased, world, plan, schedule, params.w, rng);
  } catch (const std::exception& e) {
    out.failures.push_back({k, 0, "structure-mask", e.what()});
    return out;
  }

  AwakenedInstance instance;
  try {
    Rng rng(derive_seed(params.master_seed, "guesser-awaken", static_cast<std::uint64_t>(k)));
    instance = guesser_awaken(erased, world, mask, plan, schedule, params.t_f,
                              params.w, rng);
  } catch (const std::exception& e) {
    out.failures.push_back({k, 0, "awaken", e.what()});
    return out;
  }

  Vec background;
  try {
    Rng rng(derive_seed(params.master_seed, "guesser-background", static_cast<std::uint64_t>(k)));
    background = guesser_background(erased, world, plan, erased_set, schedule,
                                    params.w, rng);
  } catch (const std::exception& e) {
    out.failures.push_back({k, 0, "background", e.what()});
    return out;
  }

  Vec composed;
  try {
    Rng rng(derive_seed(params.master_seed, "director-place", static_cast<std::uint64_t>(k)));
    const double zeta = rng.uniform(params.zeta_min, params.zeta_max);

    // scaled bounding box, mirrored from director_compose
    int r0 = g.height, r1 = -1, c0 = g.width, c1 = -1;
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        if (!instance.foreground[static_cast<std::size_t>(r * g.width + c)]) continue;
        r0 = std::min(r0, r); r1 = std::max(r1, r);
        c0 = std::min(c0, c); c1 = std::max(c1, c);
      }
    }
    const int sh = std::max(1, static_cast<int>(std::lround(zeta * (r1 - r0 + 1))));
    const int sw = std::max(1, static_cast<int>(std::lround(zeta * (c1 - c0 + 1))));
    if (sh > g.height || sw > g.width) {
      throw std::runtime_error("scaled instance does not fit the grid");
    }
    // keep the scaled instance centered on its own bbox, plus jitter
    const int cu = static_cast<int>(std::lround((r0 + r1) / 2.0 - (sh - 1) / 2.0));
    const int cv = static_cast<int>(std::lround((c0 + c1) / 2.0 - (sw - 1) / 2.0));
    const int jit = std::max(0, params.place_jitter);
    const int u = std::clamp(cu + rng.uniform_int(-jit, jit), 0, g.height - sh);
    const int v = std::clamp(cv + rng.uniform_int(-jit, jit), 0, g.width - sw);
    composed = director_compose(world, instance.image, instance.foreground,
                                background, zeta, u, v);
  } catch (const std::exception& e) {
    out.failures.push_back({k, 0, "compose", e.what()});
    return out;
  }

  for (int j = 1; j <= params.J; ++j) {
    try {
      const std::uint64_t seed = derive_seed(params.master_seed, "director-refine",
                                             static_cast<std::uint64_t>(k),
                                             static_cast<std::uint64_t>(j));
      Rng rng(seed);
      Candidate cand;
      cand.provenance.k = k;
      cand.provenance.j = j;
      cand.provenance.plan_index = plan.index;
      cand.provenance.phys_condition = phys_condition(j, plan, world, target);
      cand.provenance.seed = seed;
      cand.image = director_refine(erased, composed, cand.provenance.phys_condition,
                                   schedule, params.t_can, params.w, rng);
      out.scored.push_back(referee_score(world, std::move(cand), target,
                                         params.lambda, realism));
    } catch (const std::exception& e) {
      out.failures.push_back({k, j, "refine", e.what()});
    }
  }
  return out;
}

}  // namespace

AwakenReport pipeline_run(const ConceptWorld& world, const Predictor& erased,
                          const std::vector<ConceptId>& erased_set,
                          const ConceptId& target,
                          const KnowledgeSource& knowledge,
                          const PipelineParams& params) {
  const NoiseSchedule schedule = make_linear_schedule(100, 1e-4, 0.02);
  return pipeline_run(world, erased, erased_set, target, knowledge, params, schedule);
}

AwakenReport pipeline_run(const ConceptWorld& world, const Predictor& erased,
                          const std::vector<ConceptId>& erased_set,
                          const ConceptId& target,
                          const KnowledgeSource& knowledge,
                          const PipelineParams& params,
                          const NoiseSchedule& schedule) {
  if (!world.glyph_shape()) {
    throw std::invalid_argument("pipeline_run: world must be a glyph world");
  }
  if (params.K < 1 || params.J < 1 || params.N < 1) {
    throw std::invalid_argument("pipeline_run: K, J, N must be >= 1");
  }
  if (params.t_f < 1 || params.t_f > schedule.T || params.t_can < 0 ||
      params.t_can > schedule.T) {
    throw std::invalid_argument("pipeline_run: t_f/t_can out of range");
  }

  AwakenReport report;
  report.predictor_label = erased.label();
  report.target = target;
  report.master_seed = params.master_seed;

  report.plans = strategist_plan(knowledge, world, target, erased_set, params.K,
                                 derive_seed(params.master_seed, "strategist"));

  const RealismReference realism = make_realism_reference(world);

  std::vector<PlanOutcome> outcomes(report.plans.size());
  const int workers = std::max(1, params.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < report.plans.size(); ++i) {
      outcomes[i] = run_plan(world, erased, erased_set, target, report.plans[i],
                             schedule, realism, params);
    }
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < workers; ++t) {
      futs.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= report.plans.size()) return;
          outcomes[i] = run_plan(world, erased, erased_set, target,
                                 report.plans[i], schedule, realism, params);
        }
      }));
    }
    for (auto& f : futs) f.get();
  }

  // single aggregation point, in plan order
  std::vector<ScoredCandidate> scored;
  for (auto& o : outcomes) {
    for (auto& s : o.scored) scored.push_back(std::move(s));
    for (auto& f : o.failures) report.failures.push_back(std::move(f));
  }

  if (!scored.empty()) {
    auto sel = referee_rank_select(std::move(scored), params.N);
    report.candidates = std::move(sel.ranked);
    report.selected = std::move(sel.selected);
    report.selection_truncated = sel.truncated;
  }

  if (!report.selected.empty()) {
    double acc = 0.0, sim = 0.0;
    for (const auto& s : report.selected) {
      if (classify_top1(world, s.candidate.image) == target) acc += 1.0;
      sim += prototype_similarity(world, s.candidate.image, target);
    }
    report.selected_acc = acc / static_cast<double>(report.selected.size());
    report.selected_similarity = sim / static_cast<double>(report.selected.size());
  }
  return report;
}

std::vector<std::string> save_report(const AwakenReport& report,
                                     const ConceptWorld& world,
                                     const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  std::vector<std::string> files;
  const GridShape g = *world.glyph_shape();

  for (std::size_t i = 0; i < report.selected.size(); ++i) {
    const auto& s = report.selected[i];
    const std::string stem = "selected_" + std::to_string(i + 1) + "_k" +
                             std::to_string(s.candidate.provenance.k) + "_j" +
                             std::to_string(s.candidate.provenance.j);
    write_raster(directory + "/" + stem + ".glyr", s.candidate.image, g);
    write_preview(directory + "/" + stem + ".ppm", s.candidate.image, g);
    files.push_back(stem + ".glyr");
    files.push_back(stem + ".ppm");
  }

  {
    CsvWriter csv(directory + "/candidates.csv");
    csv.field("k").field("j").field("seed").field("score").field("rank")
        .field("predicted").field("posterior");
    csv.endrow();
    for (const auto& s : report.candidates) {
      const auto post = classify(world, s.candidate.image);
      const ConceptId top = classify_top1(world, s.candidate.image);
      csv.field(s.candidate.provenance.k)
          .field(s.candidate.provenance.j)
          .field(s.candidate.provenance.seed)
          .field(s.score)
          .field(s.rank)
          .field(top)
          .field(post.at(top));
      csv.endrow();
    }
    files.push_back("candidates.csv");
  }

  {
    CsvWriter csv(directory + "/summary.csv");
    csv.field("target").field("predictor").field("selected").field("acc")
        .field("similarity").field("failures");
    csv.endrow();
    csv.field(report.target)
        .field(report.predictor_label)
        .field(static_cast<int>(report.selected.size()))
        .field(report.selected_acc)
        .field(report.selected_similarity)
        .field(static_cast<int>(report.failures.size()));
    csv.endrow();
    files.push_back("summary.csv");
  }

  if (!report.failures.empty()) {
    CsvWriter csv(directory + "/failures.csv");
    csv.field("k").field("j").field("stage").field("what");
    csv.endrow();
    for (const auto& f : report.failures) {
      csv.field(f.k).field(f.j).field(f.stage).field(f.what);
      csv.endrow();
    }
    files.push_back("failures.csv");
  }
  return files;
}

}  // namespace glyphlab
