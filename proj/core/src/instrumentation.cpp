#include "glyphlab/instrumentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "glyphlab/vec.hpp"

namespace glyphlab {

namespace {

TrajectoryStep make_step(const State& state, const GuidanceSplit& g,
                         const ConceptWorld& world,
                         const NoiseSchedule& schedule,
                         const ProbeOptions& probes) {
  TrajectoryStep step;
  step.t = state.t;
  step.norm_text = norm2(g.gamma_text);
  step.norm_noise = norm2(g.eps_uncond);
  if (probes.xhat0_posterior) {
    const Vec x0hat = predict_x0(state, g.eps_tilde, schedule);
    step.xhat0_posterior = classify(world, x0hat);
  }
  if (probes.keep_states) step.state = state.x;
  if (probes.keep_eps) {
    step.eps_uncond = g.eps_uncond;
    step.gamma_text = g.gamma_text;
    step.eps_tilde = g.eps_tilde;
  }
  return step;
}

}  // namespace

TrajectoryRecord record_trajectory_from(const Predictor& predictor,
                                        State start,
                                        const ConditionRef& condition,
                                        const ConceptWorld& world,
                                        const NoiseSchedule& schedule, double w,
                                        Rng& rng,
                                        const ProbeOptions& probes) {
  TrajectoryRecord rec;
  rec.predictor_label = predictor.label();
  rec.condition = condition;
  rec.w = w;
  rec.schedule_T = schedule.T;

  State s = std::move(start);
  try {
    while (s.t > 0) {
      const GuidanceSplit g = guided_estimate(predictor, s, condition, schedule, w);
      rec.steps.push_back(make_step(s, g, world, schedule, probes));

      const auto t = static_cast<std::size_t>(s.t);
      const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha[t]);
      const double eps_coef =
          (1.0 - schedule.alpha[t]) / std::sqrt(1.0 - schedule.alpha_bar[t]);
      const Vec noise = rng.normal_vec(s.x.size());
      State next;
      next.t = s.t - 1;
      next.x.resize(s.x.size());
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        next.x[i] = inv_sqrt_alpha * (s.x[i] - eps_coef * g.eps_tilde[i]) +
                    schedule.sigma[t] * noise[i];
      }
      s = std::move(next);
    }
    rec.x0 = s.x;
    rec.complete = true;
  } catch (const std::exception&) {
    rec.complete = false;  // truncated record
  }
  return rec;
}

TrajectoryRecord record_trajectory(const Predictor& predictor,
                                   const ConditionRef& condition,
                                   const ConceptWorld& world,
                                   const NoiseSchedule& schedule, double w,
                                   Rng& rng, const ProbeOptions& probes) {
  State start;
  start.t = schedule.T;
  start.x = rng.normal_vec(static_cast<std::size_t>(world.dimension()));
  return record_trajectory_from(predictor, std::move(start), condition, world,
                                schedule, w, rng, probes);
}

TrajectoryRecord record_acsgn_trajectory(const Predictor& predictor,
                                         const Vec& mask_data,
                                         const ConditionRef& condition,
                                         const ConceptWorld& world,
                                         const NoiseSchedule& schedule, int t_f,
                                         double w, Rng& rng,
                                         const ProbeOptions& probes) {
  if (t_f < 1 || t_f > schedule.T) {
    throw std::invalid_argument("record_acsgn_trajectory: t_f out of [1, T]");
  }
  const Vec eta = rng.normal_vec(mask_data.size());

  TrajectoryRecord prefixed;
  // virtual forward prefix: one shared noise draw scaled per timestep
  for (int t = schedule.T; t > t_f; --t) {
    State s = forward_diffuse(mask_data, t, eta, schedule);
    const GuidanceSplit g = guided_estimate(predictor, s, condition, schedule, w);
    prefixed.steps.push_back(make_step(s, g, world, schedule, probes));
  }

  State start = forward_diffuse(mask_data, t_f, eta, schedule);
  TrajectoryRecord tail = record_trajectory_from(predictor, std::move(start),
                                                 condition, world, schedule, w,
                                                 rng, probes);
  for (auto& st : tail.steps) prefixed.steps.push_back(std::move(st));
  prefixed.x0 = std::move(tail.x0);
  prefixed.complete = tail.complete;
  prefixed.predictor_label = tail.predictor_label;
  prefixed.condition = condition;
  prefixed.w = w;
  prefixed.schedule_T = schedule.T;
  return prefixed;
}

DominanceProfile dominance_profile(const TrajectoryRecord& record) {
  if (!record.complete) {
    throw std::invalid_argument("dominance_profile: record is incomplete");
  }
  if (record.steps.empty()) {
    throw std::invalid_argument("dominance_profile: empty record");
  }
  DominanceProfile prof;
  for (const auto& s : record.steps) {
    prof.t.push_back(s.t);
    double r;
    if (s.norm_noise > 0.0) {
      r = s.norm_text / s.norm_noise;
    } else {
      r = s.norm_text > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    prof.ratio.push_back(r);
  }
  // first downward crossing scanning from the start of the record
  bool all_dominant = true;
  for (std::size_t i = 0; i < prof.ratio.size(); ++i) {
    const bool dominant = prof.ratio[i] >= 1.0;
    if (!dominant) all_dominant = false;
    if (dominant && i + 1 < prof.ratio.size() && prof.ratio[i + 1] < 1.0) {
      prof.t_star = prof.t[i];
      return prof;
    }
  }
  if (all_dominant) prof.t_star = prof.t.front();
  return prof;
}

SwitchOutcome switch_experiment(SwitchTag tag, const Predictor& original,
                                const Predictor& erased,
                                const ConceptId& condition, int T1,
                                const ConceptWorld& world,
                                const NoiseSchedule& schedule, double w,
                                Rng& rng) {
  if (T1 < 1 || T1 > schedule.T) {
    throw std::invalid_argument("switch_experiment: T1 out of [1, T]");
  }
  const ConditionRef cond = ConditionRef::of(condition);

  State s;
  s.t = schedule.T;
  s.x = rng.normal_vec(static_cast<std::size_t>(world.dimension()));

  const auto step = [&](const Predictor& p, const ConditionRef& c) {
    const Vec noise = rng.normal_vec(s.x.size());
    s = reverse_step(p, s, c, schedule, noise, w);
  };

  // the step at t = T1 is the first one taken after the switch
  switch (tag) {
    case SwitchTag::a:
      while (s.t > T1) step(original, cond);
      while (s.t > 0) step(original, ConditionRef::null());
      break;
    case SwitchTag::b:
      while (s.t > T1) step(erased, cond);
      while (s.t > 0) step(original, cond);
      break;
    case SwitchTag::c:
      while (s.t > 0) step(erased, cond);
      break;
  }

  SwitchOutcome out;
  out.tag = tag;
  out.T1 = T1;
  out.final_posterior = classify(world, s.x);
  out.final_top1 = classify_top1(world, s.x);
  const bool is_condition = out.final_top1 == condition;
  out.success = (tag == SwitchTag::a) ? is_condition : !is_condition;
  return out;
}

IntersectionReport intersection_probe(const TrajectoryRecord& a,
                                      const TrajectoryRecord& b,
                                      const ConceptWorld& world,
                                      const NoiseSchedule& schedule) {
  if (!a.complete || !b.complete) {
    throw std::invalid_argument("intersection_probe: records must be complete");
  }
  if (a.schedule_T != b.schedule_T || a.schedule_T != schedule.T) {
    throw std::invalid_argument("intersection_probe: schedule mismatch");
  }
  if (a.steps.empty() || a.steps.size() != b.steps.size()) {
    throw std::invalid_argument("intersection_probe: records cover different steps");
  }

  // average spread sets the ambient scale alongside the schedule variance
  double s2 = 0.0;
  for (const auto& c : world.concepts()) s2 += c.weight * c.spread * c.spread;
  const double d = static_cast<double>(world.dimension());

  IntersectionReport rep;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].t != b.steps[i].t) {
      throw std::invalid_argument("intersection_probe: step grids differ");
    }
    if (a.steps[i].state.empty() || b.steps[i].state.empty()) {
      throw std::invalid_argument("intersection_probe: records lack state probes");
    }
    const int t = a.steps[i].t;
    const double dist = distance(a.steps[i].state, b.steps[i].state);
    const double abar = schedule.alpha_bar[static_cast<std::size_t>(t)];
    const double v = abar * s2 + 1.0 - abar;
    const double floor = std::sqrt(2.0 * v * d);
    const double norm = dist / floor;
    rep.t.push_back(t);
    rep.distance.push_back(dist);
    rep.normalized.push_back(norm);
    if (norm < best) {
      best = norm;
      rep.t_f_hat = t;
      rep.min_distance = dist;
    }
  }
  rep.basin_a = classify_top1(world, a.x0);
  rep.basin_b = classify_top1(world, b.x0);
  rep.basin_agreement = rep.basin_a == rep.basin_b;
  return rep;
}

}  // namespace glyphlab
