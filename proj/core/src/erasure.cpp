#include "glyphlab/erasure.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace glyphlab {

// Concrete erased predictors stay private to this translation unit; the rest
// of the project sees only the Predictor surface.
namespace {

class RedirectPredictor final : public Predictor {
 public:
  RedirectPredictor(PredictorPtr base, std::vector<ConceptId> targets,
                    ConditionRef anchor)
      : base_(std::move(base)), targets_(std::move(targets)), anchor_(std::move(anchor)) {}

  Vec eps(const State& state, const ConditionRef& condition,
          const NoiseSchedule& schedule) const override {
    if (!condition.is_null() && is_target(condition.id())) {
      return base_->eps(state, anchor_, schedule);
    }
    return base_->eps(state, condition, schedule);
  }

  std::string label() const override {
    std::string l = base_->label() + "+redirect(";
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      if (i) l += ",";
      l += targets_[i];
    }
    l += "->" + anchor_.describe() + ")";
    return l;
  }

 private:
  bool is_target(const ConceptId& id) const {
    return std::find(targets_.begin(), targets_.end(), id) != targets_.end();
  }

  PredictorPtr base_;
  std::vector<ConceptId> targets_;
  ConditionRef anchor_;
};

class NegativeGuidancePredictor final : public Predictor {
 public:
  NegativeGuidancePredictor(PredictorPtr base, ConceptId target, double eta)
      : base_(std::move(base)), target_(std::move(target)), eta_(eta) {}

  Vec eps(const State& state, const ConditionRef& condition,
          const NoiseSchedule& schedule) const override {
    if (condition.is_null() || condition.id() != target_) {
      return base_->eps(state, condition, schedule);
    }
    const Vec e_null = base_->eps(state, ConditionRef::null(), schedule);
    const Vec e_tgt = base_->eps(state, condition, schedule);
    Vec out(e_null.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = e_null[i] - eta_ * (e_tgt[i] - e_null[i]);
    }
    return out;
  }

  std::string label() const override {
    return base_->label() + "+negguide(" + target_ + ",eta=" + std::to_string(eta_) + ")";
  }

 private:
  PredictorPtr base_;
  ConceptId target_;
  double eta_;
};

class EarlyWindowPredictor final : public Predictor {
 public:
  EarlyWindowPredictor(PredictorPtr base, PredictorPtr inner, int t_low)
      : base_(std::move(base)), inner_(std::move(inner)), t_low_(t_low) {}

  Vec eps(const State& state, const ConditionRef& condition,
          const NoiseSchedule& schedule) const override {
    const Predictor& p = state.t >= t_low_ ? *inner_ : *base_;
    return p.eps(state, condition, schedule);
  }

  std::string label() const override {
    return inner_->label() + "@t>=" + std::to_string(t_low_);
  }

 private:
  PredictorPtr base_;
  PredictorPtr inner_;
  int t_low_;
};

}  // namespace

PredictorPtr erase_redirect(PredictorPtr base, ConceptId target,
                            ConditionRef anchor) {
  if (!anchor.is_null() && anchor.id() == target) {
    throw std::invalid_argument("erase_redirect: anchor must differ from target");
  }
  return std::make_shared<RedirectPredictor>(
      std::move(base), std::vector<ConceptId>{std::move(target)}, std::move(anchor));
}

PredictorPtr erase_redirect_synonyms(PredictorPtr base, ConceptId target,
                                     std::vector<ConceptId> synonyms,
                                     ConditionRef anchor) {
  std::vector<ConceptId> targets{target};
  for (auto& s : synonyms) {
    if (s != target) targets.push_back(std::move(s));
  }
  for (const auto& t : targets) {
    if (!anchor.is_null() && anchor.id() == t) {
      throw std::invalid_argument("erase_redirect_synonyms: anchor must not be erased");
    }
  }
  return std::make_shared<RedirectPredictor>(std::move(base), std::move(targets),
                                             std::move(anchor));
}

PredictorPtr erase_negative_guidance(PredictorPtr base, ConceptId target,
                                     double eta) {
  if (!(eta >= 0.0)) {
    throw std::invalid_argument("erase_negative_guidance: eta must be >= 0");
  }
  return std::make_shared<NegativeGuidancePredictor>(std::move(base),
                                                     std::move(target), eta);
}

PredictorPtr erase_early_window(PredictorPtr base, PredictorPtr inner,
                                int t_low, int T) {
  // t_low = T+1 is the documented "never" edge
  if (t_low < 1 || t_low > T + 1) {
    throw std::invalid_argument("erase_early_window: t_low out of [1, T+1]");
  }
  return std::make_shared<EarlyWindowPredictor>(std::move(base), std::move(inner), t_low);
}

std::vector<ConceptId> ErasureSpec::erased_set() const {
  std::vector<ConceptId> ids{target};
  if (method == "redirect-syn") {
    for (const auto& s : synonyms) {
      if (std::find(ids.begin(), ids.end(), s) == ids.end()) ids.push_back(s);
    }
  }
  return ids;
}

PredictorPtr make_erased(PredictorPtr base, const ErasureSpec& spec, int T) {
  PredictorPtr erased;
  if (spec.method == "redirect") {
    erased = erase_redirect(base, spec.target, spec.anchor);
  } else if (spec.method == "redirect-syn") {
    erased = erase_redirect_synonyms(base, spec.target, spec.synonyms, spec.anchor);
  } else if (spec.method == "negguide") {
    erased = erase_negative_guidance(base, spec.target, spec.eta);
  } else {
    throw std::invalid_argument("make_erased: unknown method '" + spec.method + "'");
  }
  if (spec.t_low > 0) {
    erased = erase_early_window(base, erased, spec.t_low, T);
  }
  return erased;
}

}  // namespace glyphlab
