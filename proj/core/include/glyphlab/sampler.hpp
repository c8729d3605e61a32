#pragma once

#include "glyphlab/predictor.hpp"
#include "glyphlab/rng.hpp"
#include "glyphlab/schedule.hpp"

namespace glyphlab {

/// Queries the predictor under `condition` and the null condition, combines
/// them with guidance scale w. Null conditions skip the second query, so the
/// combined estimate equals the unconditional one bitwise.
GuidanceSplit guided_estimate(const Predictor& predictor, const State& state,
                              const ConditionRef& condition,
                              const NoiseSchedule& schedule, double w);

/// One DDPM reverse step:
///   x_{t-1} = (x_t - ((1-alpha_t)/sqrt(1-abar_t)) * eps_tilde) / sqrt(alpha_t)
///             + sigma_t * noise
/// Rejects t = 0. The noise vector is ignored where sigma_t = 0.
State reverse_step(const Predictor& predictor, const State& state,
                   const ConditionRef& condition,
                   const NoiseSchedule& schedule, const Vec& noise, double w);

/// Reverse-denoise from `start` down to t = 0.
Vec sample_reverse_from(const Predictor& predictor, State start,
                        const ConditionRef& condition,
                        const NoiseSchedule& schedule, double w, Rng& rng);

/// Full generation: draw x_T ~ N(0, I), then denoise to t = 0.
Vec sample_reverse(const Predictor& predictor, std::size_t dimension,
                   const ConditionRef& condition,
                   const NoiseSchedule& schedule, double w, Rng& rng);

}  // namespace glyphlab
