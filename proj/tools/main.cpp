// glyphlab: a desk-scale laboratory for concept erasure and trajectory-level
// concept awakening on an analytic mixture diffusion model.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "glyphlab/config.hpp"
#include "glyphlab/csv.hpp"
#include "glyphlab/erasure.hpp"
#include "glyphlab/instrumentation.hpp"
#include "glyphlab/manifest.hpp"
#include "glyphlab/pipeline.hpp"
#include "glyphlab/preset.hpp"
#include "glyphlab/raster.hpp"
#include "glyphlab/sampler.hpp"
#include "glyphlab/vec.hpp"
#include "glyphlab/version.hpp"

namespace fs = std::filesystem;
using namespace glyphlab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> world_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "experiment config (JSON); defaults apply when omitted");
  cmd->add_option("--seed", opts.seed, "master seed override");
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--world", opts.world_path, "world description file override");
}

struct Session {
  ExperimentConfig cfg;
  ConceptWorld world;
  NoiseSchedule schedule;
  PredictorPtr base;
  PredictorPtr erased;
  std::vector<ConceptId> erased_set;
  KnowledgeSourcePtr knowledge;
  RunManifest manifest;
};

Session open_session(const CommonOpts& opts, const std::string& command) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? config_from_json_text("")
                             : load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.world_path) cfg.world_path = *opts.world_path;
  cfg.pipeline.master_seed = cfg.seed;

  // environment override for the knowledge endpoint
  if (const char* url = std::getenv("GLYPHLAB_KNOWLEDGE_URL"); url && *url) {
    cfg.knowledge_source = "http";
    cfg.knowledge_url = url;
  }

  Session s{
      .cfg = cfg,
      .world = cfg.world_path.empty() ? well_separated_world()
                                      : load_world(cfg.world_path),
      .schedule = make_linear_schedule(cfg.schedule.T, cfg.schedule.beta_start,
                                       cfg.schedule.beta_end),
      .base = nullptr,
      .erased = nullptr,
      .erased_set = {},
      .knowledge = nullptr,
      .manifest = {},
  };
  s.base = world_predictor(s.world);
  if (!s.world.has_concept(s.cfg.erasure.target)) {
    throw std::invalid_argument("erasure target '" + s.cfg.erasure.target +
                                "' does not name a world concept");
  }
  s.erased = make_erased(s.base, s.cfg.erasure, s.schedule.T);
  s.erased_set = s.cfg.erasure.erased_set();

  KnowledgeSourcePtr table = make_table_knowledge(s.world);
  s.knowledge = s.cfg.knowledge_source == "http"
                    ? make_http_knowledge(s.cfg.knowledge_url, table)
                    : table;

  s.manifest.command = command;
  s.manifest.seed = s.cfg.seed;
  s.manifest.config_snapshot = config_to_json_text(s.cfg);
  s.manifest.started_at = iso8601_now();
  fs::create_directories(s.cfg.output_dir);
  return s;
}

void close_session(Session& s, const std::vector<std::string>& files) {
  s.manifest.finished_at = iso8601_now();
  write_manifest(s.manifest, s.cfg.output_dir, files);
  std::printf("wrote %zu artifacts + manifest.json under %s\n", files.size(),
              s.cfg.output_dir.c_str());
}

std::string out_path(const Session& s, const std::string& name) {
  return s.cfg.output_dir + "/" + name;
}

// measurement conventions recorded in manifests
constexpr const char* kTStarNote =
    "t_star convention: scanning t = T..2, the first step where ratio >= 1 "
    "ends and ratio < 1 begins; T when dominant throughout; one "
    "operationalization of the transition timestep";
constexpr const char* kSimilarityNote =
    "similarity metric: whitened prototype cosine x100 (an analogue, not CLIP)";

// ---------------------------------------------------------------------------

int cmd_world(const CommonOpts& opts, const std::string& preset,
              const std::string& out_file, bool dump_means) {
  GlyphWorldSpec spec;
  if (!preset.empty()) {
    if (preset != "well-separated") {
      throw std::invalid_argument("unknown preset '" + preset + "'");
    }
    spec = well_separated_spec();
  } else if (opts.world_path) {
    spec = load_world_spec(*opts.world_path);
  } else {
    spec = well_separated_spec();
  }
  const ConceptWorld world = make_glyph_world(spec);

  std::printf("world: %zu concepts, dimension %d (%dx%dx%d), background %.2f\n",
              world.concepts().size(), world.dimension(),
              world.glyph_shape()->height, world.glyph_shape()->width,
              world.glyph_shape()->channels, world.background());
  std::printf("%-14s %-9s %-8s %-8s %s\n", "id", "shape", "spread", "weight",
              "contexts");
  for (const auto& c : world.concepts()) {
    std::string ctx;
    for (const auto& t : c.attributes.contexts) ctx += t + " ";
    std::printf("%-14s %-9s %-8.3f %-8.4f %s\n", c.id.c_str(),
                c.attributes.shape_class.c_str(), c.spread, c.weight, ctx.c_str());
  }
  const double floor = 10.0 * world.max_spread();
  double min_dist = 1e300;
  for (const auto& a : world.concepts()) {
    for (const auto& b : world.concepts()) {
      if (a.id < b.id) min_dist = std::min(min_dist, distance(a.mean, b.mean));
    }
  }
  std::printf("min pairwise mean distance %.3f (well-separated floor %.3f)\n",
              min_dist, floor);

  if (!out_file.empty()) {
    save_world_spec(spec, out_file);
    std::printf("world description written to %s\n", out_file.c_str());
  }
  if (dump_means) {
    const std::string dir = opts.out_dir.value_or("out");
    fs::create_directories(dir);
    for (const auto& c : world.concepts()) {
      write_raster(dir + "/" + c.id + ".glyr", c.mean, *world.glyph_shape());
      write_preview(dir + "/" + c.id + ".ppm", c.mean, *world.glyph_shape());
    }
    std::printf("mean rasters written under %s\n", dir.c_str());
  }
  return 0;
}

int cmd_sample(Session& s, const std::string& concept_id, int count) {
  const ConditionRef cond = concept_id.empty() ? ConditionRef::null()
                                               : ConditionRef::of(concept_id);
  std::vector<std::string> files;
  CsvWriter csv(out_path(s, "samples.csv"));
  csv.field("index").field("condition").field("predicted").field("posterior");
  csv.endrow();
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(s.cfg.seed, "sample", (std::uint64_t)i));
    const Vec x = sample_reverse(*s.base, (size_t)s.world.dimension(), cond,
                                 s.schedule, s.cfg.pipeline.w, rng);
    const ConceptId top = classify_top1(s.world, x);
    csv.field(i).field(cond.describe()).field(top).field(
        classify(s.world, x).at(top));
    csv.endrow();
    const std::string stem = "sample_" + std::to_string(i);
    write_raster(out_path(s, stem + ".glyr"), x, *s.world.glyph_shape());
    write_preview(out_path(s, stem + ".ppm"), x, *s.world.glyph_shape());
    files.push_back(stem + ".glyr");
    files.push_back(stem + ".ppm");
  }
  files.push_back("samples.csv");
  close_session(s, files);
  return 0;
}

int cmd_erase_check(Session& s, int runs) {
  // bitwise pass-through on non-target conditions, then direct-prompt ACC
  Rng probe_rng(derive_seed(s.cfg.seed, "erase-probe"));
  int probes = 0, mismatches = 0;
  for (int i = 0; i < 16; ++i) {
    State st;
    st.t = 1 + (int)(probe_rng.uniform01() * (s.schedule.T - 1));
    st.x = probe_rng.normal_vec((size_t)s.world.dimension());
    for (const auto& c : s.world.concepts()) {
      bool is_erased = false;
      for (const auto& e : s.erased_set) is_erased |= (e == c.id);
      if (is_erased) continue;
      ++probes;
      if (s.erased->eps(st, ConditionRef::of(c.id), s.schedule) !=
          s.base->eps(st, ConditionRef::of(c.id), s.schedule)) {
        ++mismatches;
      }
    }
  }

  int hits = 0;
  for (int i = 0; i < runs; ++i) {
    Rng rng(derive_seed(s.cfg.seed, "erase-acc", (std::uint64_t)i));
    const Vec x = sample_reverse(*s.erased, (size_t)s.world.dimension(),
                                 ConditionRef::of(s.cfg.erasure.target),
                                 s.schedule, s.cfg.pipeline.w, rng);
    if (classify_top1(s.world, x) == s.cfg.erasure.target) ++hits;
  }

  CsvWriter csv(out_path(s, "erase_check.csv"));
  csv.field("target").field("method").field("passthrough_probes")
      .field("passthrough_mismatches").field("direct_prompt_runs")
      .field("direct_prompt_hits").field("direct_prompt_acc");
  csv.endrow();
  csv.field(s.cfg.erasure.target).field(s.cfg.erasure.method).field(probes)
      .field(mismatches).field(runs).field(hits)
      .field((double)hits / std::max(1, runs));
  csv.endrow();

  std::printf("pass-through: %d/%d bitwise identical; direct-prompt ACC %.3f\n",
              probes - mismatches, probes, (double)hits / std::max(1, runs));
  close_session(s, {"erase_check.csv"});
  return mismatches == 0 ? 0 : 1;
}

int cmd_awaken(Session& s) {
  const AwakenReport rep =
      pipeline_run(s.world, *s.erased, s.erased_set, s.cfg.erasure.target,
                   *s.knowledge, s.cfg.pipeline, s.schedule);
  auto files = save_report(rep, s.world, s.cfg.output_dir);
  std::printf("selected %zu candidate(s); ACC %.3f, similarity %.2f; %zu stage failure(s)\n",
              rep.selected.size(), rep.selected_acc, rep.selected_similarity,
              rep.failures.size());
  s.manifest.notes.push_back(kSimilarityNote);
  close_session(s, files);
  return rep.selected.empty() ? 1 : 0;
}

int cmd_trajectory(Session& s, const std::string& concept_id, bool use_erased) {
  const ConditionRef cond = concept_id.empty()
                                ? ConditionRef::of(s.cfg.erasure.target)
                                : ConditionRef::of(concept_id);
  const Predictor& pred = use_erased ? *s.erased : *s.base;
  Rng rng(derive_seed(s.cfg.seed, "trajectory"));
  const auto rec = record_trajectory(pred, cond, s.world, s.schedule,
                                     s.cfg.pipeline.w, rng);

  CsvWriter csv(out_path(s, "trajectory.csv"));
  csv.field("t").field("norm_text").field("norm_noise").field("ratio")
      .field("top1").field("p_top1");
  csv.endrow();
  const auto prof = dominance_profile(rec);
  for (size_t i = 0; i < rec.steps.size(); ++i) {
    const auto& st = rec.steps[i];
    ConceptId top;
    double p = 0.0;
    for (const auto& [id, prob] : st.xhat0_posterior) {
      if (prob > p) {
        p = prob;
        top = id;
      }
    }
    csv.field(st.t).field(st.norm_text).field(st.norm_noise)
        .field(prof.ratio[i]).field(top).field(p);
    csv.endrow();
  }
  std::printf("trajectory of %s under %s: final %s\n", cond.describe().c_str(),
              pred.label().c_str(), classify_top1(s.world, rec.x0).c_str());
  s.manifest.notes.push_back(kTStarNote);
  close_session(s, {"trajectory.csv"});
  return 0;
}

int cmd_dominance(Session& s, const std::string& concept_id, int runs) {
  const ConditionRef cond = concept_id.empty()
                                ? ConditionRef::of(s.cfg.erasure.target)
                                : ConditionRef::of(concept_id);
  CsvWriter csv(out_path(s, "dominance.csv"));
  csv.field("seed").field("t_star").field("found");
  csv.endrow();
  int found = 0;
  for (int i = 0; i < runs; ++i) {
    Rng rng(derive_seed(s.cfg.seed, "dominance", (std::uint64_t)i));
    const auto rec = record_trajectory(*s.base, cond, s.world, s.schedule,
                                       s.cfg.pipeline.w, rng,
                                       {.xhat0_posterior = false});
    const auto prof = dominance_profile(rec);
    csv.field(i).field(prof.t_star.value_or(-1)).field((int)prof.t_star.has_value());
    csv.endrow();
    found += prof.t_star.has_value();
  }
  std::printf("t* detected in %d/%d runs (w = %.2f)\n", found, runs,
              s.cfg.pipeline.w);
  s.manifest.notes.push_back(kTStarNote);
  close_session(s, {"dominance.csv"});
  return 0;
}

int cmd_switch(Session& s, const std::string& tag_str, std::vector<int> T1s,
               int runs) {
  SwitchTag tag;
  if (tag_str == "a") tag = SwitchTag::a;
  else if (tag_str == "b") tag = SwitchTag::b;
  else if (tag_str == "c") tag = SwitchTag::c;
  else throw std::invalid_argument("switch tag must be a, b or c");
  if (T1s.empty()) T1s = {s.schedule.T / 2};

  CsvWriter csv(out_path(s, "switch.csv"));
  csv.field("tag").field("T1").field("seed").field("success");
  csv.endrow();
  for (int T1 : T1s) {
    // tag c uses the early-window model built from the configured erasure
    PredictorPtr model = s.erased;
    if (tag == SwitchTag::c) {
      ErasureSpec windowed = s.cfg.erasure;
      windowed.t_low = windowed.t_low > 0 ? windowed.t_low : 70;
      model = make_erased(s.base, windowed, s.schedule.T);
    }
    int ok = 0;
    for (int i = 0; i < runs; ++i) {
      Rng rng(derive_seed(s.cfg.seed, "switch-" + tag_str, (std::uint64_t)T1,
                          (std::uint64_t)i));
      const auto out = switch_experiment(tag, *s.base, *model,
                                         s.cfg.erasure.target, T1, s.world,
                                         s.schedule, s.cfg.pipeline.w, rng);
      csv.field(tag_str).field(T1).field(i).field((int)out.success);
      csv.endrow();
      ok += out.success;
    }
    std::printf("tag %s, T1 = %3d: success %d/%d\n", tag_str.c_str(), T1, ok, runs);
  }
  close_session(s, {"switch.csv"});
  return 0;
}

int cmd_intersect(Session& s, int runs) {
  const auto plans = strategist_plan(*s.knowledge, s.world, s.cfg.erasure.target,
                                     s.erased_set, 1,
                                     derive_seed(s.cfg.seed, "strategist"));
  const ProbeOptions probes{.xhat0_posterior = false, .keep_states = true};

  CsvWriter summary(out_path(s, "intersect_summary.csv"));
  summary.field("run").field("t_f_hat").field("min_distance").field("basin_a")
      .field("basin_b").field("agreement");
  summary.endrow();

  CsvWriter curves(out_path(s, "intersect_curves.csv"));
  curves.field("run").field("t").field("distance").field("normalized");
  curves.endrow();

  int agree = 0;
  for (int i = 0; i < runs; ++i) {
    Rng rng_m(derive_seed(s.cfg.seed, "intersect-mask", (std::uint64_t)i));
    const auto mask = build_structure_mask(*s.erased, s.world, plans[0],
                                           s.schedule, s.cfg.pipeline.w, rng_m);
    Rng rng_a(derive_seed(s.cfg.seed, "intersect-acsgn", (std::uint64_t)i));
    const auto rec_a = record_acsgn_trajectory(
        *s.erased, mask.data, plans[0].adjective_condition, s.world, s.schedule,
        s.cfg.pipeline.t_f, s.cfg.pipeline.w, rng_a, probes);
    Rng rng_r(derive_seed(s.cfg.seed, "intersect-ref", (std::uint64_t)i));
    const auto rec_r = record_trajectory(
        *s.base, ConditionRef::of(s.cfg.erasure.target), s.world, s.schedule,
        s.cfg.pipeline.w, rng_r, probes);

    const auto rep = intersection_probe(rec_a, rec_r, s.world, s.schedule);
    agree += rep.basin_agreement;
    summary.field(i).field(rep.t_f_hat).field(rep.min_distance)
        .field(rep.basin_a).field(rep.basin_b).field((int)rep.basin_agreement);
    summary.endrow();
    for (size_t k = 0; k < rep.t.size(); ++k) {
      curves.field(i).field(rep.t[k]).field(rep.distance[k]).field(rep.normalized[k]);
      curves.endrow();
    }
  }
  std::printf("basin agreement %d/%d\n", agree, runs);
  s.manifest.notes.push_back(
      "t_f_hat is the argmin of the noise-floor-normalized state distance; "
      "raw per-step distances are reported alongside");
  close_session(s, {"intersect_summary.csv", "intersect_curves.csv"});
  return 0;
}

int cmd_bench(Session& s) {
  BenchParams bp;
  bp.samples_per_concept = s.cfg.bench_samples;
  bp.count_failures_as_misses = s.cfg.bench_count_failures_as_misses;
  bp.master_seed = s.cfg.seed;
  const auto table =
      benchmark_awaken(s.world, *s.base, *s.erased, s.erased_set,
                       s.cfg.erasure.target, *s.knowledge, s.schedule,
                       s.cfg.pipeline, bp);
  CsvWriter csv(out_path(s, "benchmark.csv"));
  csv.field("concept").field("setting").field("acc").field("similarity").field("n");
  csv.endrow();
  for (const auto& row : table.rows) {
    csv.field(row.concept_id).field(row.setting).field(row.acc)
        .field(row.similarity).field(row.n);
    csv.endrow();
    std::printf("%-14s %-9s ACC %.3f  sim %6.2f  n=%d\n", row.concept_id.c_str(),
                row.setting.c_str(), row.acc, row.similarity, row.n);
  }
  s.manifest.notes.push_back(kSimilarityNote);
  close_session(s, {"benchmark.csv"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glyphlab: concept erasure and trajectory-level awakening on an "
               "analytic mixture diffusion model"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts opts;

  auto* world_cmd = app.add_subcommand("world", "inspect or build a world description");
  std::string preset, world_out;
  bool dump_means = false;
  add_common(world_cmd, opts);
  world_cmd->add_option("--preset", preset, "built-in preset name (well-separated)");
  world_cmd->add_option("--out-file", world_out, "write the world description JSON here");
  world_cmd->add_flag("--dump-means", dump_means, "dump concept mean rasters");

  auto* sample_cmd = app.add_subcommand("sample", "draw conditional or unconditional samples");
  std::string sample_concept;
  int sample_count = 4;
  add_common(sample_cmd, opts);
  sample_cmd->add_option("--concept", sample_concept, "condition (empty = unconditional)");
  sample_cmd->add_option("--count", sample_count, "number of samples")->check(CLI::PositiveNumber);

  auto* erase_cmd = app.add_subcommand("erase-check",
                                       "verify pass-through and measure direct-prompt ACC");
  int erase_runs = 50;
  add_common(erase_cmd, opts);
  erase_cmd->add_option("--runs", erase_runs, "sampling runs")->check(CLI::PositiveNumber);

  auto* awaken_cmd = app.add_subcommand("awaken", "run the four-agent awakening pipeline");
  std::optional<int> K, J, N;
  add_common(awaken_cmd, opts);
  awaken_cmd->add_option("--K", K, "surrogate plan count override");
  awaken_cmd->add_option("--J", J, "refinement condition count override");
  awaken_cmd->add_option("--N", N, "selection size override");

  auto* traj_cmd = app.add_subcommand("trajectory", "record one guided reverse trajectory");
  std::string traj_concept;
  bool traj_erased = false;
  add_common(traj_cmd, opts);
  traj_cmd->add_option("--concept", traj_concept, "condition (default: erasure target)");
  traj_cmd->add_flag("--erased", traj_erased, "record under the erased model");

  auto* dom_cmd = app.add_subcommand("dominance", "transition-timestep statistics");
  std::string dom_concept;
  int dom_runs = 100;
  add_common(dom_cmd, opts);
  dom_cmd->add_option("--concept", dom_concept, "condition (default: erasure target)");
  dom_cmd->add_option("--runs", dom_runs, "seeded runs")->check(CLI::PositiveNumber);

  auto* switch_cmd = app.add_subcommand("switch", "model/condition switching experiments");
  std::string switch_tag = "a";
  std::vector<int> switch_T1;
  int switch_runs = 100;
  add_common(switch_cmd, opts);
  switch_cmd->add_option("--tag", switch_tag, "experiment tag: a, b or c");
  switch_cmd->add_option("--T1", switch_T1, "switch step(s); default T/2");
  switch_cmd->add_option("--runs", switch_runs, "seeds per switch point")
      ->check(CLI::PositiveNumber);

  auto* inter_cmd = app.add_subcommand("intersect", "trajectory intersection probes");
  int inter_runs = 50;
  add_common(inter_cmd, opts);
  inter_cmd->add_option("--runs", inter_runs, "paired runs")->check(CLI::PositiveNumber);

  auto* bench_cmd = app.add_subcommand("bench", "original / erased / awakened benchmark");
  add_common(bench_cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (world_cmd->parsed()) return cmd_world(opts, preset, world_out, dump_means);

    const std::string command = app.get_subcommands().front()->get_name();
    Session s = open_session(opts, command);

    if (sample_cmd->parsed()) return cmd_sample(s, sample_concept, sample_count);
    if (erase_cmd->parsed()) return cmd_erase_check(s, erase_runs);
    if (awaken_cmd->parsed()) {
      if (K) s.cfg.pipeline.K = *K;
      if (J) s.cfg.pipeline.J = *J;
      if (N) s.cfg.pipeline.N = *N;
      s.cfg.validate();
      return cmd_awaken(s);
    }
    if (traj_cmd->parsed()) return cmd_trajectory(s, traj_concept, traj_erased);
    if (dom_cmd->parsed()) return cmd_dominance(s, dom_concept, dom_runs);
    if (switch_cmd->parsed()) return cmd_switch(s, switch_tag, switch_T1, switch_runs);
    if (inter_cmd->parsed()) return cmd_intersect(s, inter_runs);
    if (bench_cmd->parsed()) return cmd_bench(s);
  } catch (const std::exception& e) {
    std::cerr << "glyphlab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
