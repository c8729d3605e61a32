#include "glyphlab/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "glyphlab/vec.hpp"

namespace glyphlab {

void NoiseSchedule::validate() const {
  if (T < 2) throw std::invalid_argument("NoiseSchedule: T must be >= 2");
  const auto n = static_cast<std::size_t>(T) + 1;
  if (beta.size() != n || alpha.size() != n || alpha_bar.size() != n ||
      sigma.size() != n) {
    throw std::invalid_argument("NoiseSchedule: coefficient arrays must have T+1 entries");
  }
  if (alpha_bar[0] != 1.0) {
    throw std::invalid_argument("NoiseSchedule: alpha_bar[0] must be 1");
  }
  for (int t = 1; t <= T; ++t) {
    const double b = beta[t];
    if (!(b > 0.0 && b < 1.0)) {
      throw std::invalid_argument("NoiseSchedule: beta out of (0,1) at t=" + std::to_string(t));
    }
    if (t > 1 && beta[t] < beta[t - 1]) {
      throw std::invalid_argument("NoiseSchedule: beta must be non-decreasing");
    }
    if (alpha[t] != 1.0 - b) {
      throw std::invalid_argument("NoiseSchedule: alpha != 1 - beta at t=" + std::to_string(t));
    }
    if (!(alpha_bar[t] < alpha_bar[t - 1])) {
      throw std::invalid_argument("NoiseSchedule: alpha_bar must be strictly decreasing");
    }
    if (!(sigma[t] >= 0.0)) {
      throw std::invalid_argument("NoiseSchedule: sigma must be nonnegative");
    }
  }
}

NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end) {
  if (T < 2) throw std::invalid_argument("make_linear_schedule: T must be >= 2");
  if (!std::isfinite(beta_start) || !std::isfinite(beta_end)) {
    throw std::invalid_argument("make_linear_schedule: non-finite beta bounds");
  }
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw std::invalid_argument("make_linear_schedule: require 0 < beta_start <= beta_end < 1");
  }

  NoiseSchedule s;
  s.T = T;
  s.beta.assign(static_cast<std::size_t>(T) + 1, 0.0);
  s.alpha.assign(static_cast<std::size_t>(T) + 1, 1.0);
  s.alpha_bar.assign(static_cast<std::size_t>(T) + 1, 1.0);
  s.sigma.assign(static_cast<std::size_t>(T) + 1, 0.0);

  for (int t = 1; t <= T; ++t) {
    const double frac = static_cast<double>(t - 1) / static_cast<double>(T - 1);
    s.beta[t] = beta_start + frac * (beta_end - beta_start);
    s.alpha[t] = 1.0 - s.beta[t];
    s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
  }
  // posterior variance; (1 - abar_0) = 0 zeroes out sigma_1
  for (int t = 1; t <= T; ++t) {
    const double var =
        s.beta[t] * (1.0 - s.alpha_bar[t - 1]) / (1.0 - s.alpha_bar[t]);
    s.sigma[t] = std::sqrt(var);
  }
  s.validate();
  return s;
}

State forward_diffuse(const Vec& x0, int t, const Vec& noise,
                      const NoiseSchedule& schedule) {
  if (t < 0 || t > schedule.T) {
    throw std::invalid_argument("forward_diffuse: t out of [0, T]");
  }
  check_same_size(x0, noise, "forward_diffuse");
  const double abar = schedule.alpha_bar[static_cast<std::size_t>(t)];
  const double a = std::sqrt(abar);
  const double b = std::sqrt(1.0 - abar);
  State out;
  out.t = t;
  out.x.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    out.x[i] = a * x0[i] + b * noise[i];
  }
  return out;
}

Vec predict_x0(const State& state, const Vec& eps,
               const NoiseSchedule& schedule) {
  if (state.t < 1 || state.t > schedule.T) {
    throw std::invalid_argument("predict_x0: t out of [1, T]");
  }
  check_same_size(state.x, eps, "predict_x0");
  const double abar = schedule.alpha_bar[static_cast<std::size_t>(state.t)];
  const double a = std::sqrt(abar);
  const double b = std::sqrt(1.0 - abar);
  Vec x0(state.x.size());
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    x0[i] = (state.x[i] - b * eps[i]) / a;
  }
  return x0;
}

GuidanceSplit cfg_combine(const Vec& eps_cond, const Vec& eps_uncond,
                          double w) {
  check_same_size(eps_cond, eps_uncond, "cfg_combine");
  if (!(w >= 1.0)) {
    throw std::invalid_argument("cfg_combine: guidance scale w must be >= 1");
  }
  GuidanceSplit g;
  g.eps_cond = eps_cond;
  g.eps_uncond = eps_uncond;
  g.w = w;
  g.gamma_text.resize(eps_cond.size());
  g.eps_tilde.resize(eps_cond.size());
  for (std::size_t i = 0; i < eps_cond.size(); ++i) {
    g.gamma_text[i] = w * (eps_cond[i] - eps_uncond[i]);
    g.eps_tilde[i] = g.eps_uncond[i] + g.gamma_text[i];
  }
  return g;
}

}  // namespace glyphlab
