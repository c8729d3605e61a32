#pragma once

#include "glyphlab/types.hpp"

namespace glyphlab {

/// Per-step coefficients of a DDPM noise schedule.
///
/// Arrays are indexed by timestep t = 1..T (index 0 is a placeholder except
/// for alpha_bar, where alpha_bar[0] = 1 is the empty product). sigma holds
/// the reverse-step noise scale, sigma_t^2 = beta_t * (1 - abar_{t-1}) /
/// (1 - abar_t), which makes sigma_1 = 0 and the final step deterministic.
struct NoiseSchedule {
  int T = 0;
  Vec beta;       // beta[t], t in 1..T
  Vec alpha;      // 1 - beta[t]
  Vec alpha_bar;  // prod_{s<=t} alpha[s]; alpha_bar[0] = 1
  Vec sigma;      // reverse-step noise scale, sigma[1] = 0

  void validate() const;  // throws on any broken invariant
};

/// Linear beta ramp from beta_start to beta_end over T steps.
NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end);

/// x_t = sqrt(abar_t) * x0 + sqrt(1 - abar_t) * noise. t = 0 returns x0.
State forward_diffuse(const Vec& x0, int t, const Vec& noise,
                      const NoiseSchedule& schedule);

/// x0_hat = (x_t - sqrt(1 - abar_t) * eps) / sqrt(abar_t). Rejects t = 0.
Vec predict_x0(const State& state, const Vec& eps,
               const NoiseSchedule& schedule);

/// Decomposition of a guided noise estimate into its unconditional part and
/// the w-scaled conditional delta. eps_tilde is computed coordinate-wise as
/// eps_uncond[i] + gamma_text[i], in that order, so the identity
/// eps_tilde == eps_uncond + gamma_text is bitwise.
struct GuidanceSplit {
  Vec eps_uncond;
  Vec eps_cond;
  double w = 1.0;
  Vec gamma_text;  // w * (eps_cond - eps_uncond)
  Vec eps_tilde;   // eps_uncond + gamma_text
};

/// Classifier-free guidance combination. Requires w >= 1.
GuidanceSplit cfg_combine(const Vec& eps_cond, const Vec& eps_uncond,
                          double w);

}  // namespace glyphlab
