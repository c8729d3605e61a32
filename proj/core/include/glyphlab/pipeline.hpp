#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "glyphlab/agents.hpp"
#include "glyphlab/erasure.hpp"

namespace glyphlab {

struct PipelineParams {
  int K = 100;
  int J = 3;
  int N = 1;
  int t_f = 70;
  int t_can = 35;
  double w = 7.5;
  double lambda = 0.7;
  double zeta_min = 0.85;
  double zeta_max = 1.0;
  // placement draws (u, v) within +-place_jitter of the position that keeps
  // the scaled instance centered where it was generated; the mixture
  // classifier is position-sensitive, so unconstrained placement would push
  // every composite off-manifold
  int place_jitter = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

struct StageFailure {
  int k = 0;
  int j = 0;  // 0 when the failure precedes refinement
  std::string stage;
  std::string what;
};

struct AwakenReport {
  std::string predictor_label;
  ConceptId target;
  std::uint64_t master_seed = 0;

  std::vector<SurrogatePlan> plans;
  std::vector<ScoredCandidate> candidates;  // ranked, every scored candidate
  std::vector<ScoredCandidate> selected;    // rank <= N
  std::vector<StageFailure> failures;
  bool selection_truncated = false;

  // summary metrics over the selected set
  double selected_acc = 0.0;
  double selected_similarity = 0.0;
};

/// Runs Strategist -> Guesser -> Director -> Referee against the erased
/// predictor, touching it only through Predictor::eps. Candidates (k, j) are
/// independent given their derived seeds; `workers` > 1 fans them out across
/// threads without changing any output.
AwakenReport pipeline_run(const ConceptWorld& world, const Predictor& erased,
                          const std::vector<ConceptId>& erased_set,
                          const ConceptId& target,
                          const KnowledgeSource& knowledge,
                          const PipelineParams& params,
                          const NoiseSchedule& schedule);

/// Convenience overload on the default T = 100 linear schedule.
AwakenReport pipeline_run(const ConceptWorld& world, const Predictor& erased,
                          const std::vector<ConceptId>& erased_set,
                          const ConceptId& target,
                          const KnowledgeSource& knowledge,
                          const PipelineParams& params);

/// Persists a report directory: selected rasters with previews, a
/// per-candidate CSV (k, j, seed, score, rank, predicted concept, posterior)
/// and a summary CSV. Returns the list of files written (relative paths).
std::vector<std::string> save_report(const AwakenReport& report,
                                     const ConceptWorld& world,
                                     const std::string& directory);

}  // namespace glyphlab
