#pragma once

#include <vector>

#include "glyphlab/predictor.hpp"

namespace glyphlab {

/// Redirect erasure: queries conditioned on `target` are answered as if the
/// condition were `anchor`; every other condition passes through bitwise.
PredictorPtr erase_redirect(PredictorPtr base, ConceptId target,
                            ConditionRef anchor = ConditionRef::null());

/// Redirect erasure that also redirects a list of synonym concept ids.
PredictorPtr erase_redirect_synonyms(PredictorPtr base, ConceptId target,
                                     std::vector<ConceptId> synonyms,
                                     ConditionRef anchor = ConditionRef::null());

/// Negative-guidance erasure: queries conditioned on `target` return
/// eps_null - eta * (eps_target - eps_null), both terms from the base model.
PredictorPtr erase_negative_guidance(PredictorPtr base, ConceptId target,
                                     double eta);

/// Applies `inner` (an erased wrapper of `base`) only for t >= t_low; below
/// t_low queries go to `base`. t_low = T+1 never triggers the erased branch.
PredictorPtr erase_early_window(PredictorPtr base, PredictorPtr inner,
                                int t_low, int T);

/// Experiment-config description of an erasure.
struct ErasureSpec {
  std::string method = "redirect";  // redirect | negguide | redirect-syn
  ConceptId target;
  ConditionRef anchor = ConditionRef::null();
  double eta = 2.0;
  std::vector<ConceptId> synonyms;
  int t_low = 0;  // > 0 restricts erasure to t >= t_low

  /// All concept ids this spec suppresses (target plus synonyms when the
  /// method redirects them).
  std::vector<ConceptId> erased_set() const;
};

PredictorPtr make_erased(PredictorPtr base, const ErasureSpec& spec, int T);

}  // namespace glyphlab
