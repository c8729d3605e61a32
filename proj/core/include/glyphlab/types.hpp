#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glyphlab {

using Vec = std::vector<double>;
using ConceptId = std::string;

/// Conditioning input for a noise predictor: either a concept id or the
/// null condition.
class ConditionRef {
 public:
  ConditionRef() = default;

  static ConditionRef null() { return ConditionRef(); }
  static ConditionRef of(ConceptId id) {
    ConditionRef c;
    c.id_ = std::move(id);
    return c;
  }

  bool is_null() const { return !id_.has_value(); }
  const ConceptId& id() const {
    if (!id_) throw std::logic_error("ConditionRef: null condition has no id");
    return *id_;
  }

  bool operator==(const ConditionRef& o) const { return id_ == o.id_; }

  std::string describe() const { return id_ ? *id_ : std::string("<null>"); }

 private:
  std::optional<ConceptId> id_;
};

/// A point on a diffusion trajectory: data/latent vector plus timestep.
/// t = 0 denotes clean data, t = T the noisiest state.
struct State {
  Vec x;
  int t = 0;
};

}  // namespace glyphlab
