#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glyphlab/concept_world.hpp"
#include "glyphlab/knowledge.hpp"
#include "glyphlab/predictor.hpp"
#include "glyphlab/rng.hpp"
#include "glyphlab/sampler.hpp"

namespace glyphlab {

struct ProbeOptions {
  bool xhat0_posterior = true;
  bool keep_states = false;
  bool keep_eps = false;
};

struct TrajectoryStep {
  int t = 0;
  double norm_text = 0.0;   // ||gamma_text||_2
  double norm_noise = 0.0;  // ||eps_uncond||_2
  std::map<ConceptId, double> xhat0_posterior;
  // filled only when the corresponding probe is on
  Vec state;  // x_t before the step
  Vec eps_uncond, gamma_text, eps_tilde;
};

struct TrajectoryRecord {
  std::vector<TrajectoryStep> steps;  // t strictly decreasing
  Vec x0;
  std::string predictor_label;
  ConditionRef condition;
  double w = 7.5;
  std::uint64_t seed = 0;
  bool complete = false;
  int schedule_T = 0;
};

/// Reverse run T..1 with per-step diagnostics. A predictor failure mid-run
/// yields a truncated record flagged incomplete.
TrajectoryRecord record_trajectory(const Predictor& predictor,
                                   const ConditionRef& condition,
                                   const ConceptWorld& world,
                                   const NoiseSchedule& schedule, double w,
                                   Rng& rng, const ProbeOptions& probes = {});

/// Same, but starting from a given state (t may be below T).
TrajectoryRecord record_trajectory_from(const Predictor& predictor,
                                        State start,
                                        const ConditionRef& condition,
                                        const ConceptWorld& world,
                                        const NoiseSchedule& schedule, double w,
                                        Rng& rng,
                                        const ProbeOptions& probes = {});

/// ACSGN trajectory with a virtual forward prefix: for t = T..t_f the state
/// is the forward diffusion of `mask_data` under one shared noise draw, then
/// reverse denoising runs t_f..1 under `condition`. Lets intersection probes
/// compare full-length trajectories.
TrajectoryRecord record_acsgn_trajectory(const Predictor& predictor,
                                         const Vec& mask_data,
                                         const ConditionRef& condition,
                                         const ConceptWorld& world,
                                         const NoiseSchedule& schedule, int t_f,
                                         double w, Rng& rng,
                                         const ProbeOptions& probes = {});

struct DominanceProfile {
  std::vector<int> t;           // descending, aligned with ratio
  std::vector<double> ratio;    // ||gamma_text|| / ||eps_noise||
  std::optional<int> t_star;
};

/// Ratios and the transition timestep t*.
///
/// Scanning t = T..2, t* is the first t with ratio_t >= 1 and
/// ratio_{t-1} < 1 (the step where text dominance ends). A profile with
/// ratio >= 1 everywhere reports t* = T (dominant from the start); a profile
/// that never reaches 1 has no t*. A zero noise norm yields ratio = +inf
/// when the text norm is positive and 0 when both vanish.
DominanceProfile dominance_profile(const TrajectoryRecord& record);

enum class SwitchTag { a, b, c };

struct SwitchOutcome {
  SwitchTag tag = SwitchTag::a;
  int T1 = 0;
  std::map<ConceptId, double> final_posterior;
  ConceptId final_top1;
  bool success = false;
};

/// Figure-style model/condition switching:
///   a: original under `condition` from T down to T1, then null condition to
///      1; success when the final classification is the condition concept.
///   b: erased under `condition` from T down to T1, then original to 1;
///      success when the concept is NOT recovered.
///   c: the supplied erased predictor (typically an early-window wrapper)
///      throughout; success when the concept is suppressed.
SwitchOutcome switch_experiment(SwitchTag tag, const Predictor& original,
                                const Predictor& erased,
                                const ConceptId& condition, int T1,
                                const ConceptWorld& world,
                                const NoiseSchedule& schedule, double w,
                                Rng& rng);

struct IntersectionReport {
  std::vector<int> t;              // descending common steps
  std::vector<double> distance;    // raw per-step L2 distance
  std::vector<double> normalized;  // distance / sqrt(2 * v_t * d)
  int t_f_hat = 0;                 // argmin of the normalized distance
  double min_distance = 0.0;       // raw distance at t_f_hat
  ConceptId basin_a, basin_b;
  bool basin_agreement = false;
};

/// Per-step distance between two recorded trajectories (requires state
/// probes and matching schedules). t_f_hat is the argmin of the
/// noise-normalized distance, which discounts the shrinking ambient noise
/// floor; raw distances are reported alongside.
IntersectionReport intersection_probe(const TrajectoryRecord& a,
                                      const TrajectoryRecord& b,
                                      const ConceptWorld& world,
                                      const NoiseSchedule& schedule);

// ---------------------------------------------------------------------------
// awakening benchmark

struct BenchRow {
  ConceptId concept_id;
  std::string setting;  // original | erased | awakened
  double acc = 0.0;
  double similarity = 0.0;
  int n = 0;
};

struct BenchTable {
  std::vector<BenchRow> rows;
};

struct BenchParams {
  int samples_per_concept = 200;
  bool count_failures_as_misses = true;
  std::uint64_t master_seed = 0;
};

/// Table-style benchmark for one erased target: direct-prompt ACC and
/// similarity under the original and the erased model, plus the awakening
/// pipeline's selected-output metrics over `samples_per_concept` runs.
struct PipelineParams;  // glyphlab/pipeline.hpp

BenchTable benchmark_awaken(const ConceptWorld& world, const Predictor& original,
                            const Predictor& erased,
                            const std::vector<ConceptId>& erased_set,
                            const ConceptId& target,
                            const KnowledgeSource& knowledge,
                            const NoiseSchedule& schedule,
                            const PipelineParams& pipeline_params,
                            const BenchParams& bench_params);

}  // namespace glyphlab
