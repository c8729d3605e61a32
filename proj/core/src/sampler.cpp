#include "glyphlab/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "glyphlab/vec.hpp"

namespace glyphlab {

GuidanceSplit guided_estimate(const Predictor& predictor, const State& state,
                              const ConditionRef& condition,
                              const NoiseSchedule& schedule, double w) {
  Vec eps_uncond = predictor.eps(state, ConditionRef::null(), schedule);
  if (condition.is_null()) {
    return cfg_combine(eps_uncond, eps_uncond, w);
  }
  Vec eps_cond = predictor.eps(state, condition, schedule);
  return cfg_combine(eps_cond, eps_uncond, w);
}

State reverse_step(const Predictor& predictor, const State& state,
                   const ConditionRef& condition,
                   const NoiseSchedule& schedule, const Vec& noise, double w) {
  if (state.t < 1 || state.t > schedule.T) {
    throw std::invalid_argument("reverse_step: t out of [1, T]");
  }
  check_same_size(state.x, noise, "reverse_step");

  const GuidanceSplit g = guided_estimate(predictor, state, condition, schedule, w);

  const auto t = static_cast<std::size_t>(state.t);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha[t]);
  const double eps_coef =
      (1.0 - schedule.alpha[t]) / std::sqrt(1.0 - schedule.alpha_bar[t]);
  const double sig = schedule.sigma[t];

  State out;
  out.t = state.t - 1;
  out.x.resize(state.x.size());
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    out.x[i] = inv_sqrt_alpha * (state.x[i] - eps_coef * g.eps_tilde[i]) +
               sig * noise[i];
  }
  return out;
}

Vec sample_reverse_from(const Predictor& predictor, State start,
                        const ConditionRef& condition,
                        const NoiseSchedule& schedule, double w, Rng& rng) {
  State s = std::move(start);
  while (s.t > 0) {
    const Vec noise = rng.normal_vec(s.x.size());
    s = reverse_step(predictor, s, condition, schedule, noise, w);
  }
  return s.x;
}

Vec sample_reverse(const Predictor& predictor, std::size_t dimension,
                   const ConditionRef& condition,
                   const NoiseSchedule& schedule, double w, Rng& rng) {
  State s;
  s.t = schedule.T;
  s.x = rng.normal_vec(dimension);
  return sample_reverse_from(predictor, std::move(s), condition, schedule, w, rng);
}

}  // namespace glyphlab
