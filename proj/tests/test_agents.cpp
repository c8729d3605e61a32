#include <doctest.h>

#include <cmath>

#include "glyphlab/erasure.hpp"
#include "glyphlab/pipeline.hpp"
#include "glyphlab/preset.hpp"
#include "glyphlab/sampler.hpp"
#include "glyphlab/vec.hpp"
#include "oracles.hpp"

using namespace glyphlab;

namespace {

struct Fixture {
  ConceptWorld world = well_separated_world();
  NoiseSchedule sched = make_linear_schedule(100, 1e-4, 0.02);
  PredictorPtr base = world_predictor(world);
  PredictorPtr erased = erase_redirect(base, "ruby_disk");
  KnowledgeSourcePtr knowledge = make_table_knowledge(world);
  std::vector<ConceptId> erased_set{"ruby_disk"};
};

SurrogatePlan default_plan(const Fixture& fx, const char* surrogate = "crimson_disk") {
  SurrogatePlan p;
  p.index = 1;
  p.surrogate = surrogate;
  p.color_prior = fx.world.concept_by_id("ruby_disk").attributes.color;
  p.adjective_condition = ConditionRef::null();
  p.context_condition = ConditionRef::of("meadow");
  return p;
}

}  // namespace

TEST_CASE("strategist produces exactly K validated plans") {
  Fixture fx;
  const auto plans = strategist_plan(*fx.knowledge, fx.world, "ruby_disk",
                                     fx.erased_set, 100, 7);
  CHECK(plans.size() == 100);
  for (const auto& p : plans) {
    CHECK(p.surrogate != "ruby_disk");
    CHECK(fx.world.concept_by_id(p.surrogate).attributes.shape_class == "disk");
    // color prior is the target's canonical color
    CHECK(p.color_prior == fx.world.concept_by_id("ruby_disk").attributes.color);
    // "glossy" names no concept, so the adjective condition degrades to null
    CHECK(p.adjective_condition.is_null());
  }
  // crimson_disk is the color-closest permissible disk under plain redirect
  CHECK(plans[0].surrogate == "crimson_disk");
  // contexts cycle through the target's tags
  CHECK(plans[0].context_condition == ConditionRef::of("meadow"));
  CHECK(plans[1].context_condition == ConditionRef::of("night_sky"));
}

TEST_CASE("strategist under redirect-syn avoids the erased synonym") {
  Fixture fx;
  const std::vector<ConceptId> erased_set{"ruby_disk", "crimson_disk"};
  const auto plans = strategist_plan(*fx.knowledge, fx.world, "ruby_disk",
                                     erased_set, 10, 7);
  for (const auto& p : plans) CHECK(p.surrogate == "pearl_disk");
}

TEST_CASE("strategist fails when no shape-compatible surrogate exists") {
  Fixture fx;
  const std::vector<ConceptId> erased_set{"ruby_disk", "crimson_disk", "pearl_disk"};
  CHECK_THROWS_WITH_AS(
      strategist_plan(*fx.knowledge, fx.world, "ruby_disk", erased_set, 4, 7),
      doctest::Contains("shape_class"), std::runtime_error);
}

TEST_CASE("tied surrogates alternate deterministically") {
  GlyphWorldSpec spec;
  spec.grid = {16, 16, 3};
  GlyphConceptSpec target, left, right;
  target.id = "target";
  target.shape = "disk";
  target.color = {0.5, 0.9, 0.5};
  left.id = "a_left";
  left.shape = "disk";
  left.color = {0.4, 0.9, 0.5};  // color distance 0.1, exactly
  right.id = "b_right";
  right.shape = "disk";
  right.color = {0.6, 0.9, 0.5};  // color distance 0.1, exactly
  spec.concepts = {target, left, right};
  const ConceptWorld world = make_glyph_world(spec);
  const auto knowledge = make_table_knowledge(world);
  const auto plans = strategist_plan(*knowledge, world, "target", {"target"}, 6, 7);
  for (int k = 0; k < 6; ++k) {
    CHECK(plans[(size_t)k].surrogate == (k % 2 == 0 ? "a_left" : "b_right"));
  }
}

TEST_CASE("structure mask recolors the surrogate geometry") {
  Fixture fx;
  SurrogatePlan plan = default_plan(fx);
  Rng rng(91);
  const StructureMask mask =
      build_structure_mask(*fx.erased, fx.world, plan, fx.sched, 7.5, rng);

  const GridShape g = *fx.world.glyph_shape();
  const auto expected_fg =
      segment_foreground(fx.world, fx.world.concept_by_id("crimson_disk").mean);

  SUBCASE("foreground carries the color prior, background is neutral") {
    for (int p = 0; p < g.pixels(); ++p) {
      for (int ch = 0; ch < 3; ++ch) {
        const double v = mask.data[(size_t)(p * 3 + ch)];
        if (mask.foreground[(size_t)p]) {
          CHECK(v == plan.color_prior[(size_t)ch]);
        } else {
          CHECK(v == fx.world.background());
        }
      }
    }
  }
  SUBCASE("foreground matches the surrogate glyph within 5% Hamming distance") {
    const int fg_size = foreground_count(expected_fg);
    for (int i = 0; i < 100; ++i) {
      Rng r(derive_seed(92, "mask-hamming", (std::uint64_t)i));
      const StructureMask m =
          build_structure_mask(*fx.erased, fx.world, plan, fx.sched, 7.5, r);
      int hamming = 0;
      for (size_t p = 0; p < m.foreground.size(); ++p) {
        hamming += m.foreground[p] != expected_fg[p];
      }
      CHECK(hamming <= fg_size / 20);
    }
  }
}

TEST_CASE("degenerate all-background generation raises EmptyForeground") {
  // a world whose only surrogate has a color within the segmentation
  // threshold of the background rasterizes but never segments
  GlyphWorldSpec spec;
  spec.grid = {8, 8, 3};
  GlyphConceptSpec target, ghost;
  target.id = "target";
  target.shape = "disk";
  target.color = {0.9, 0.1, 0.1};
  target.radius = 2.0;
  ghost.id = "ghost";
  ghost.shape = "disk";
  ghost.color = {0.55, 0.55, 0.55};  // deviation 0.05 < threshold
  ghost.radius = 2.0;
  ghost.spread = 0.01;
  spec.concepts = {target, ghost};
  const ConceptWorld world = make_glyph_world(spec);
  const NoiseSchedule sched = make_linear_schedule(100, 1e-4, 0.02);
  const PredictorPtr base = world_predictor(world);

  SurrogatePlan plan;
  plan.index = 1;
  plan.surrogate = "ghost";
  plan.color_prior = {0.9, 0.1, 0.1};
  Rng rng(93);
  CHECK_THROWS_AS(build_structure_mask(*base, world, plan, sched, 7.5, rng),
                  EmptyForeground);
}

TEST_CASE("guesser_awaken behavior across injection depths") {
  Fixture fx;
  SurrogatePlan plan = default_plan(fx);
  StructureMask mask;
  mask.data = fx.world.concept_by_id("ruby_disk").mean;
  mask.foreground = segment_foreground(fx.world, mask.data);

  SUBCASE("default depth lands in the target basin most of the time") {
    int ruby = 0;
    const int n = 30;
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(94, "awaken", (std::uint64_t)i));
      const auto inst =
          guesser_awaken(*fx.erased, fx.world, mask, plan, fx.sched, 70, 7.5, rng);
      if (classify_top1(fx.world, inst.image) == "ruby_disk") ++ruby;
    }
    CHECK(ruby >= (int)(0.6 * n));
  }
  SUBCASE("shallow injection stays close to the mask") {
    Rng rng(95);
    const auto inst =
        guesser_awaken(*fx.erased, fx.world, mask, plan, fx.sched, 5, 7.5, rng);
    CHECK(distance(inst.image, mask.data) < 0.25 * norm2(mask.data));
    CHECK(classify_top1(fx.world, inst.image) == "ruby_disk");
  }
  SUBCASE("full-depth injection weakens the mask's hold") {
    // at t_f = T the schedule still keeps sqrt(abar_T) of the structure, so
    // decoupling is partial; it must be clearly weaker than at t_f = 70
    int ruby_70 = 0, ruby_T = 0;
    const int n = 30;
    for (int i = 0; i < n; ++i) {
      Rng r1(derive_seed(96, "awaken70", (std::uint64_t)i));
      Rng r2(derive_seed(96, "awakenT", (std::uint64_t)i));
      if (classify_top1(fx.world, guesser_awaken(*fx.erased, fx.world, mask, plan,
                                                 fx.sched, 70, 7.5, r1)
                                      .image) == "ruby_disk") {
        ++ruby_70;
      }
      if (classify_top1(fx.world, guesser_awaken(*fx.erased, fx.world, mask, plan,
                                                 fx.sched, 100, 7.5, r2)
                                      .image) == "ruby_disk") {
        ++ruby_T;
      }
    }
    CHECK(ruby_T <= ruby_70 - 3);
  }
  SUBCASE("t_f out of range rejected") {
    Rng rng(97);
    CHECK_THROWS_AS(
        guesser_awaken(*fx.erased, fx.world, mask, plan, fx.sched, 0, 7.5, rng),
        std::invalid_argument);
    CHECK_THROWS_AS(
        guesser_awaken(*fx.erased, fx.world, mask, plan, fx.sched, 101, 7.5, rng),
        std::invalid_argument);
  }
}

TEST_CASE("guesser_background") {
  Fixture fx;
  SurrogatePlan plan = default_plan(fx);

  SUBCASE("context samples classify as the context concept") {
    int ok = 0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(98, "bg", (std::uint64_t)i));
      const Vec bg = guesser_background(*fx.erased, fx.world, plan, fx.erased_set,
                                        fx.sched, 7.5, rng);
      const auto post = classify(fx.world, bg);
      if (post.at("meadow") >= 0.9) ++ok;
    }
    CHECK(ok >= (int)(0.9 * n));
  }
  SUBCASE("null context gives an unconditional sample") {
    SurrogatePlan p = plan;
    p.context_condition = ConditionRef::null();
    Rng rng(99);
    const Vec bg =
        guesser_background(*fx.erased, fx.world, p, fx.erased_set, fx.sched, 7.5, rng);
    CHECK((int)bg.size() == fx.world.dimension());
  }
  SUBCASE("fixed seed reproduces the background bitwise") {
    Rng r1(100), r2(100);
    CHECK(guesser_background(*fx.erased, fx.world, plan, fx.erased_set, fx.sched,
                             7.5, r1) ==
          guesser_background(*fx.erased, fx.world, plan, fx.erased_set, fx.sched,
                             7.5, r2));
  }
  SUBCASE("erased context rejected") {
    SurrogatePlan p = plan;
    p.context_condition = ConditionRef::of("meadow");
    const std::vector<ConceptId> erased_set{"ruby_disk", "meadow"};
    Rng rng(101);
    CHECK_THROWS_WITH_AS(guesser_background(*fx.erased, fx.world, p, erased_set,
                                            fx.sched, 7.5, rng),
                         doctest::Contains("erased"), std::invalid_argument);
  }
}

TEST_CASE("director_compose") {
  Fixture fx;
  const GridShape g = *fx.world.glyph_shape();
  const Vec& instance = fx.world.concept_by_id("ruby_disk").mean;
  const auto mask = segment_foreground(fx.world, instance);
  const Vec neutral((size_t)g.size(), fx.world.background());

  SUBCASE("unit scale onto a neutral background reproduces the instance") {
    // paste back at the foreground's own bbox corner
    int r0 = g.height, c0 = g.width;
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        if (mask[(size_t)(r * g.width + c)]) {
          r0 = std::min(r0, r);
          c0 = std::min(c0, c);
        }
      }
    }
    const Vec out = director_compose(fx.world, instance, mask, neutral, 1.0, r0, c0);
    CHECK(out == instance);
  }
  SUBCASE("pasted pixel count tracks zeta^2 within 10%") {
    const int fg = foreground_count(mask);
    for (double zeta : {0.8, 0.9, 1.0}) {
      const Vec out = director_compose(fx.world, instance, mask, neutral, zeta, 2, 2);
      const auto out_fg = segment_foreground(fx.world, out);
      const double expect = zeta * zeta * fg;
      CHECK(std::abs(foreground_count(out_fg) - expect) <= 0.10 * fg + 1.0);
    }
  }
  SUBCASE("one-pixel degenerate composition stays valid") {
    const Vec out = director_compose(fx.world, instance, mask, neutral, 0.12, 3, 3);
    const auto out_fg = segment_foreground(fx.world, out);
    CHECK(foreground_count(out_fg) >= 1);
    CHECK(foreground_count(out_fg) <= 4);
  }
  SUBCASE("out-of-bounds placement rejected") {
    CHECK_THROWS_AS(director_compose(fx.world, instance, mask, neutral, 1.0, 12, 12),
                    std::invalid_argument);
    CHECK_THROWS_AS(director_compose(fx.world, instance, mask, neutral, 1.0, -1, 0),
                    std::invalid_argument);
  }
  SUBCASE("zeta must be positive") {
    CHECK_THROWS_AS(director_compose(fx.world, instance, mask, neutral, 0.0, 0, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("director_refine") {
  Fixture fx;
  const GridShape g = *fx.world.glyph_shape();

  // a composed scene: the ruby instance pasted onto a meadow sample
  Rng bg_rng(102);
  const Vec background = sample_reverse(*fx.erased, (size_t)fx.world.dimension(),
                                        ConditionRef::of("meadow"), fx.sched, 7.5,
                                        bg_rng);
  const Vec& instance = fx.world.concept_by_id("ruby_disk").mean;
  const auto mask = segment_foreground(fx.world, instance);
  int r0 = g.height, c0 = g.width;
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (mask[(size_t)(r * g.width + c)]) {
        r0 = std::min(r0, r);
        c0 = std::min(c0, c);
      }
    }
  }
  const Vec composed =
      director_compose(fx.world, instance, mask, background, 1.0, r0, c0);

  SUBCASE("t_can = 0 returns the composition unchanged") {
    Rng rng(103);
    CHECK(director_refine(*fx.erased, composed, ConditionRef::null(), fx.sched, 0,
                          7.5, rng) == composed);
  }
  SUBCASE("refinement reduces the paste-boundary energy in most seeds") {
    const double before = oracle::boundary_energy(composed, mask, g.height,
                                                  g.width, g.channels);
    int reduced = 0;
    const int n = 25;
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(104, "refine", (std::uint64_t)i));
      const Vec refined = director_refine(*fx.erased, composed, ConditionRef::null(),
                                          fx.sched, 35, 7.5, rng);
      const double after = oracle::boundary_energy(refined, mask, g.height,
                                                   g.width, g.channels);
      if (after < before) ++reduced;
    }
    CHECK(reduced >= (int)(0.8 * n));
  }
}

TEST_CASE("referee scoring") {
  Fixture fx;
  const RealismReference realism = make_realism_reference(fx.world);

  Candidate clean;
  clean.image = fx.world.concept_by_id("ruby_disk").mean;
  clean.provenance = {1, 1, 1, ConditionRef::null(), 0};

  SUBCASE("the exact target mean scores near the maximum") {
    const auto scored = referee_score(fx.world, clean, "ruby_disk", 0.7, realism);
    CHECK(scored.score >= 0.9);
  }
  SUBCASE("lambda = 1 reduces to the classifier posterior") {
    const auto scored = referee_score(fx.world, clean, "ruby_disk", 1.0, realism);
    const auto post = classify(fx.world, clean.image);
    CHECK(scored.score == doctest::Approx(post.at("ruby_disk")).epsilon(1e-12));
  }
  SUBCASE("ranking is invariant under a shared affine realism rescale") {
    Rng rng(105);
    std::vector<ScoredCandidate> a, b;
    RealismReference shifted{realism.lo - 25.0, realism.hi + 25.0};
    for (int i = 0; i < 8; ++i) {
      Candidate c;
      c.image = sample_data(fx.world, fx.world.concepts()[(size_t)(i % 6)].id, rng);
      c.provenance = {i + 1, 1, i + 1, ConditionRef::null(), 0};
      a.push_back(referee_score(fx.world, c, "ruby_disk", 0.7, realism));
      b.push_back(referee_score(fx.world, c, "ruby_disk", 0.7, shifted));
    }
    const auto ra = referee_rank_select(a, 8);
    const auto rb = referee_rank_select(b, 8);
    for (size_t i = 0; i < 8; ++i) {
      CHECK(ra.ranked[i].candidate.provenance.k == rb.ranked[i].candidate.provenance.k);
    }
  }
  SUBCASE("lambda outside [0,1] rejected") {
    CHECK_THROWS_AS(referee_score(fx.world, clean, "ruby_disk", 1.2, realism),
                    std::invalid_argument);
  }
}

TEST_CASE("referee_rank_select") {
  const auto mk = [](int k, int j, double score) {
    ScoredCandidate s;
    s.candidate.provenance = {k, j, k, ConditionRef::null(), 0};
    s.score = score;
    return s;
  };

  SUBCASE("top-1 of distinct scores") {
    auto res = referee_rank_select({mk(1, 1, 0.9), mk(2, 1, 0.5), mk(3, 1, 0.7)}, 1);
    CHECK(res.selected.size() == 1);
    CHECK(res.selected[0].candidate.provenance.k == 1);
    CHECK(res.ranked[0].rank == 1);
    CHECK(res.ranked[1].rank == 2);
    CHECK(res.ranked[2].rank == 3);
    CHECK(res.ranked[1].candidate.provenance.k == 3);
  }
  SUBCASE("ties break by provenance order") {
    auto res = referee_rank_select({mk(2, 2, 0.5), mk(1, 2, 0.5), mk(1, 1, 0.5)}, 2);
    CHECK(res.selected[0].candidate.provenance.k == 1);
    CHECK(res.selected[0].candidate.provenance.j == 1);
    CHECK(res.selected[1].candidate.provenance.j == 2);
  }
  SUBCASE("N covering the population selects everything") {
    auto res = referee_rank_select({mk(1, 1, 0.1), mk(2, 1, 0.2)}, 2);
    CHECK(res.selected.size() == 2);
    CHECK_FALSE(res.truncated);
  }
  SUBCASE("N beyond the population returns all, flagged") {
    auto res = referee_rank_select({mk(1, 1, 0.1)}, 5);
    CHECK(res.selected.size() == 1);
    CHECK(res.truncated);
  }
  SUBCASE("monotone selection: growing N only appends") {
    std::vector<ScoredCandidate> pool;
    Rng rng(106);
    for (int k = 1; k <= 9; ++k) pool.push_back(mk(k, 1, rng.uniform01()));
    std::vector<int> prev;
    for (int N = 1; N <= 9; ++N) {
      const auto res = referee_rank_select(pool, N);
      std::vector<int> ks;
      for (const auto& s : res.selected) ks.push_back(s.candidate.provenance.k);
      for (size_t i = 0; i < prev.size(); ++i) CHECK(ks[i] == prev[i]);
      prev = ks;
    }
  }
}

// The pipeline touches the erased model only through Predictor::eps. This
// wrapper would fail the test if anything else were required of it.
namespace {

class OpaqueCounting final : public Predictor {
 public:
  OpaqueCounting(PredictorPtr inner, int* calls) : inner_(std::move(inner)), calls_(calls) {}
  Vec eps(const State& state, const ConditionRef& condition,
          const NoiseSchedule& schedule) const override {
    ++*calls_;
    return inner_->eps(state, condition, schedule);
  }
  std::string label() const override { return "opaque"; }

 private:
  PredictorPtr inner_;
  int* calls_;
};

}  // namespace

TEST_CASE("pipeline runs against a fully opaque predictor surface") {
  Fixture fx;
  int calls = 0;
  const auto opaque = std::make_shared<OpaqueCounting>(fx.erased, &calls);

  PipelineParams params;
  params.K = 2;
  params.J = 1;
  params.N = 1;
  params.master_seed = 77;
  const AwakenReport rep = pipeline_run(fx.world, *opaque, fx.erased_set,
                                        "ruby_disk", *fx.knowledge, params, fx.sched);
  CHECK(rep.selected.size() == 1);
  CHECK(calls > 0);
  CHECK(rep.plans.size() == 2);
}

TEST_CASE("pipeline smoke run and candidate count") {
  Fixture fx;
  PipelineParams params;
  params.K = 4;
  params.J = 3;
  params.N = 2;
  params.master_seed = 78;
  const AwakenReport rep = pipeline_run(fx.world, *fx.erased, fx.erased_set,
                                        "ruby_disk", *fx.knowledge, params, fx.sched);
  CHECK(rep.candidates.size() + rep.failures.size() == 12);
  CHECK(rep.selected.size() == 2);
  // ranks are a permutation of 1..n
  std::vector<bool> seen(rep.candidates.size() + 1, false);
  for (const auto& c : rep.candidates) {
    CHECK(c.rank >= 1);
    CHECK(c.rank <= (int)rep.candidates.size());
    CHECK_FALSE(seen[(size_t)c.rank]);
    seen[(size_t)c.rank] = true;
  }
}

TEST_CASE("pipeline determinism under a fixed master seed") {
  Fixture fx;
  PipelineParams params;
  params.K = 3;
  params.J = 2;
  params.N = 1;
  params.master_seed = 79;
  const AwakenReport a = pipeline_run(fx.world, *fx.erased, fx.erased_set,
                                      "ruby_disk", *fx.knowledge, params, fx.sched);
  const AwakenReport b = pipeline_run(fx.world, *fx.erased, fx.erased_set,
                                      "ruby_disk", *fx.knowledge, params, fx.sched);
  REQUIRE(a.selected.size() == b.selected.size());
  CHECK(a.selected[0].candidate.image == b.selected[0].candidate.image);
  CHECK(a.selected[0].score == b.selected[0].score);

  SUBCASE("worker fan-out does not change any output") {
    PipelineParams par = params;
    par.workers = 2;
    const AwakenReport c = pipeline_run(fx.world, *fx.erased, fx.erased_set,
                                        "ruby_disk", *fx.knowledge, par, fx.sched);
    REQUIRE(c.candidates.size() == a.candidates.size());
    for (size_t i = 0; i < c.candidates.size(); ++i) {
      CHECK(c.candidates[i].candidate.image == a.candidates[i].candidate.image);
      CHECK(c.candidates[i].rank == a.candidates[i].rank);
    }
  }
}

TEST_CASE("awakening beats direct prompting for every erasure variant") {
  // scaled-down version of the acceptance gate; the acceptance suite runs
  // the full budget
  Fixture fx;
  std::vector<ErasureSpec> variants;
  variants.push_back({.method = "redirect", .target = "ruby_disk"});
  variants.push_back({.method = "negguide", .target = "ruby_disk", .eta = 2.0});
  variants.push_back({.method = "redirect-syn",
                      .target = "ruby_disk",
                      .synonyms = {"crimson_disk"}});
  for (const auto& spec : variants) {
    CAPTURE(spec.method);
    const PredictorPtr erased = make_erased(fx.base, spec, fx.sched.T);
    const auto erased_set = spec.erased_set();
    int awaken_ok = 0, direct_ok = 0;
    const int runs = 10;
    for (int i = 0; i < runs; ++i) {
      PipelineParams pp;
      pp.K = 8;
      pp.J = 3;
      pp.N = 1;
      pp.master_seed = derive_seed(80, spec.method, (std::uint64_t)i);
      const auto rep = pipeline_run(fx.world, *erased, erased_set, "ruby_disk",
                                    *fx.knowledge, pp, fx.sched);
      if (!rep.selected.empty() &&
          classify_top1(fx.world, rep.selected[0].candidate.image) == "ruby_disk") {
        ++awaken_ok;
      }
      Rng rng(derive_seed(81, spec.method, (std::uint64_t)i));
      const Vec x = sample_reverse(*erased, (size_t)fx.world.dimension(),
                                   ConditionRef::of("ruby_disk"), fx.sched, 7.5, rng);
      if (classify_top1(fx.world, x) == "ruby_disk") ++direct_ok;
    }
    CHECK(awaken_ok >= 7);
    CHECK(direct_ok <= 1);
    CHECK(awaken_ok - direct_ok >= 4);  // >= 40 points at this scale
  }
}
