#pragma once

#include <memory>
#include <string>

#include "glyphlab/schedule.hpp"
#include "glyphlab/types.hpp"

namespace glyphlab {

/// Black-box noise estimation surface eps(x_t, t, condition).
///
/// Implementations must be pure: the same (state, condition, schedule) always
/// yields the same output, and nothing beyond this call surface is exposed.
/// Erased models and the base model are both values of this type.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual Vec eps(const State& state, const ConditionRef& condition,
                  const NoiseSchedule& schedule) const = 0;

  virtual std::string label() const = 0;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

}  // namespace glyphlab
