#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glyphlab/concept_world.hpp"
#include "glyphlab/knowledge.hpp"
#include "glyphlab/predictor.hpp"
#include "glyphlab/rng.hpp"

namespace glyphlab {

/// Chromatically informed foreground mask: the surrogate's segmented
/// geometry recolored with the target's color prior on a neutral background.
struct StructureMask {
  Vec data;
  std::vector<std::uint8_t> foreground;
};

struct AwakenedInstance {
  Vec image;
  std::vector<std::uint8_t> foreground;
};

struct CandidateProvenance {
  int k = 0;
  int j = 0;
  int plan_index = 0;
  ConditionRef phys_condition;
  std::uint64_t seed = 0;
};

struct Candidate {
  Vec image;
  CandidateProvenance provenance;
};

struct ScoredCandidate {
  Candidate candidate;
  double score = 0.0;
  int rank = 0;  // 1-based after referee_rank_select
};

/// Reference quantiles that map log-likelihood onto [0,1] for the realism
/// term of the referee score. Derived deterministically from the world.
struct RealismReference {
  double lo = 0.0;
  double hi = 1.0;
};

RealismReference make_realism_reference(const ConceptWorld& world,
                                        int samples_per_concept = 64);

/// Derives exactly K surrogate plans for the erased target. Drafts come from
/// the knowledge source and are validated here: a surrogate must resolve,
/// share the target's shape_class and not be erased; invalid drafts are
/// replaced from the table source with a warning. Throws when no
/// shape-compatible surrogate exists at all.
std::vector<SurrogatePlan> strategist_plan(const KnowledgeSource& knowledge,
                                           const ConceptWorld& world,
                                           const ConceptId& erased_target,
                                           const std::vector<ConceptId>& erased_set,
                                           int K, std::uint64_t seed);

/// Generates a surrogate image by full reverse sampling under the erased
/// predictor, segments it, recolors the foreground with the plan's color
/// prior and resets the background to neutral. Throws EmptyForeground when
/// segmentation finds nothing.
struct EmptyForeground : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StructureMask build_structure_mask(const Predictor& erased,
                                   const ConceptWorld& world,
                                   const SurrogatePlan& plan,
                                   const NoiseSchedule& schedule, double w,
                                   Rng& rng);

/// ACSGN: forward-diffuses the mask to t_f, then reverse-denoises under the
/// plan's adjective condition; returns the segmented instance.
AwakenedInstance guesser_awaken(const Predictor& erased,
                                const ConceptWorld& world,
                                const StructureMask& mask,
                                const SurrogatePlan& plan,
                                const NoiseSchedule& schedule, int t_f,
                                double w, Rng& rng);

/// Full reverse sample under the plan's context condition. Rejects erased
/// context conditions.
Vec guesser_background(const Predictor& erased, const ConceptWorld& world,
                       const SurrogatePlan& plan,
                       const std::vector<ConceptId>& erased_set,
                       const NoiseSchedule& schedule, double w, Rng& rng);

/// Nearest-neighbor rescale of the masked instance by zeta, pasted onto the
/// background with the foreground winning at (u, v) (top-left grid offset).
Vec director_compose(const ConceptWorld& world, const Vec& instance,
                     const std::vector<std::uint8_t>& instance_mask,
                     const Vec& background, double zeta, int u, int v);

/// Forward-diffuses the composed image to t_can and reverse-denoises under
/// the physical-refinement condition. t_can = 0 returns the input unchanged.
Vec director_refine(const Predictor& erased, const Vec& composed,
                    const ConditionRef& phys_condition,
                    const NoiseSchedule& schedule, int t_can, double w,
                    Rng& rng);

/// Holistic score: lambda * posterior(target | image) + (1 - lambda) *
/// realism, where realism is the log-likelihood mapped onto [0,1] by the
/// reference quantiles and clamped.
ScoredCandidate referee_score(const ConceptWorld& world, Candidate candidate,
                              const ConceptId& erased_target, double lambda,
                              const RealismReference& realism);

struct SelectionResult {
  std::vector<ScoredCandidate> ranked;    // all candidates, ranks assigned
  std::vector<ScoredCandidate> selected;  // rank <= N
  bool truncated = false;                 // N exceeded the population
};

/// Ranks descending by score (ties by (k, j) order) and keeps the top N.
SelectionResult referee_rank_select(std::vector<ScoredCandidate> scored, int N);

}  // namespace glyphlab
