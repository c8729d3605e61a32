#include "glyphlab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "glyphlab/sampler.hpp"
#include "glyphlab/vec.hpp"

namespace glyphlab {

RealismReference make_realism_reference(const ConceptWorld& world,
                                        int samples_per_concept) {
  // seeded from the world's mean bytes so the reference is a pure function
  // of the world
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& c : world.concepts()) {
    h = fnv1a64(c.id, h);
    h = fnv1a64(c.mean.data(), c.mean.size() * sizeof(double), h);
  }
  Rng rng(derive_seed(h, "realism-reference"));

  std::vector<double> lls;
  for (const auto& c : world.concepts()) {
    for (int i = 0; i < samples_per_concept; ++i) {
      lls.push_back(log_likelihood(world, sample_data(world, c.id, rng)));
    }
  }
  std::sort(lls.begin(), lls.end());
  const auto q = [&](double p) {
    const auto idx = static_cast<std::size_t>(p * (static_cast<double>(lls.size()) - 1.0));
    return lls[idx];
  };
  RealismReference ref;
  ref.lo = q(0.05);
  ref.hi = q(0.95);
  if (ref.hi <= ref.lo) ref.hi = ref.lo + 1.0;
  return ref;
}

std::vector<SurrogatePlan> strategist_plan(const KnowledgeSource& knowledge,
                                           const ConceptWorld& world,
                                           const ConceptId& erased_target,
                                           const std::vector<ConceptId>& erased_set,
                                           int K, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("strategist_plan: K must be >= 1");
  const Concept& target = world.concept_by_id(erased_target);

  KnowledgeQuery q;
  q.target = erased_target;
  q.attributes = target.attributes;
  q.erased_set = erased_set;
  q.count = K;
  q.seed = seed;

  auto plans = knowledge.drafts(q);
  if (static_cast<int>(plans.size()) != K) {
    throw std::runtime_error("strategist_plan: knowledge source returned " +
                             std::to_string(plans.size()) + " drafts, expected " +
                             std::to_string(K));
  }

  const auto is_erased = [&](const ConceptId& id) {
    return std::find(erased_set.begin(), erased_set.end(), id) != erased_set.end();
  };
  const auto valid = [&](const SurrogatePlan& p) {
    if (!world.has_concept(p.surrogate)) return false;
    if (p.surrogate == erased_target || is_erased(p.surrogate)) return false;
    if (world.concept_by_id(p.surrogate).attributes.shape_class !=
        target.attributes.shape_class) {
      return false;
    }
    for (double c : p.color_prior) {
      if (!(c >= 0.0 && c <= 1.0)) return false;
    }
    if (!p.adjective_condition.is_null() &&
        !world.has_concept(p.adjective_condition.id())) {
      return false;
    }
    if (!p.context_condition.is_null() &&
        !world.has_concept(p.context_condition.id())) {
      return false;
    }
    return true;
  };

  // repair invalid drafts from the deterministic table source; the table
  // itself throws when the shape-class constraint cannot be met
  std::optional<std::vector<SurrogatePlan>> table_plans;
  for (int k = 0; k < K; ++k) {
    auto& p = plans[static_cast<std::size_t>(k)];
    p.index = k + 1;
    if (valid(p)) continue;
    if (!table_plans) {
      table_plans = make_table_knowledge(world)->drafts(q);
    }
    std::cerr << "[glyphlab] strategist: replacing invalid draft k=" << (k + 1)
              << " from the table source\n";
    p = (*table_plans)[static_cast<std::size_t>(k)];
    p.index = k + 1;
  }
  return plans;
}

StructureMask build_structure_mask(const Predictor& erased,
                                   const ConceptWorld& world,
                                   const SurrogatePlan& plan,
                                   const NoiseSchedule& schedule, double w,
                                   Rng& rng) {
  if (!world.glyph_shape()) {
    throw std::logic_error("build_structure_mask: world has no glyph shape");
  }
  const GridShape g = *world.glyph_shape();

  const Vec surrogate_image =
      sample_reverse(erased, static_cast<std::size_t>(world.dimension()),
                     ConditionRef::of(plan.surrogate), schedule, w, rng);
  auto fg = segment_foreground(world, surrogate_image);
  if (foreground_count(fg) == 0) {
    throw EmptyForeground("build_structure_mask: segmentation found no foreground for surrogate '" +
                          plan.surrogate + "'");
  }

  StructureMask mask;
  mask.foreground = std::move(fg);
  mask.data.assign(static_cast<std::size_t>(g.size()), world.background());
  for (int p = 0; p < g.pixels(); ++p) {
    if (!mask.foreground[static_cast<std::size_t>(p)]) continue;
    for (int ch = 0; ch < g.channels; ++ch) {
      mask.data[static_cast<std::size_t>(p * g.channels + ch)] =
          g.channels == 3
              ? plan.color_prior[static_cast<std::size_t>(ch)]
              : (plan.color_prior[0] + plan.color_prior[1] + plan.color_prior[2]) / 3.0;
    }
  }
  return mask;
}

AwakenedInstance guesser_awaken(const Predictor& erased,
                                const ConceptWorld& world,
                                const StructureMask& mask,
                                const SurrogatePlan& plan,
                                const NoiseSchedule& schedule, int t_f,
                                double w, Rng& rng) {
  if (t_f < 1 || t_f > schedule.T) {
    throw std::invalid_argument("guesser_awaken: t_f out of [1, T]");
  }
  const Vec eta = rng.normal_vec(mask.data.size());
  State noised = forward_diffuse(mask.data, t_f, eta, schedule);
  Vec image = sample_reverse_from(erased, std::move(noised),
                                  plan.adjective_condition, schedule, w, rng);
  auto fg = segment_foreground(world, image);
  if (foreground_count(fg) == 0) {
    throw EmptyForeground("guesser_awaken: denoised instance has no foreground");
  }
  AwakenedInstance out;
  out.image = std::move(image);
  out.foreground = std::move(fg);
  return out;
}

Vec guesser_background(const Predictor& erased, const ConceptWorld& world,
                       const SurrogatePlan& plan,
                       const std::vector<ConceptId>& erased_set,
                       const NoiseSchedule& schedule, double w, Rng& rng) {
  if (!plan.context_condition.is_null()) {
    const auto& id = plan.context_condition.id();
    if (!world.has_concept(id)) {
      throw std::invalid_argument("guesser_background: unknown context '" + id + "'");
    }
    if (std::find(erased_set.begin(), erased_set.end(), id) != erased_set.end()) {
      throw std::invalid_argument("guesser_background: context '" + id + "' is erased");
    }
  }
  return sample_reverse(erased, static_cast<std::size_t>(world.dimension()),
                        plan.context_condition, schedule, w, rng);
}

Vec director_compose(const ConceptWorld& world, const Vec& instance,
                     const std::vector<std::uint8_t>& instance_mask,
                     const Vec& background, double zeta, int u, int v) {
  if (!world.glyph_shape()) {
    throw std::logic_error("director_compose: world has no glyph shape");
  }
  if (!(zeta > 0.0)) {
    throw std::invalid_argument("director_compose: zeta must be > 0");
  }
  const GridShape g = *world.glyph_shape();
  check_same_size(instance, background, "director_compose");

  // bounding box of the instance foreground
  int r0 = g.height, r1 = -1, c0 = g.width, c1 = -1;
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (!instance_mask[static_cast<std::size_t>(r * g.width + c)]) continue;
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
    }
  }
  if (r1 < 0) throw std::invalid_argument("director_compose: empty instance mask");

  const int bh = r1 - r0 + 1;
  const int bw = c1 - c0 + 1;
  const int sh = std::max(1, static_cast<int>(std::lround(zeta * bh)));
  const int sw = std::max(1, static_cast<int>(std::lround(zeta * bw)));
  if (u < 0 || v < 0 || u + sh > g.height || v + sw > g.width) {
    throw std::invalid_argument("director_compose: placement out of bounds");
  }

  Vec out = background;
  for (int r = 0; r < sh; ++r) {
    for (int c = 0; c < sw; ++c) {
      // center-aligned nearest-neighbor source pixel inside the bbox
      int sr = r0 + static_cast<int>((r + 0.5) * bh / sh);
      int sc = c0 + static_cast<int>((c + 0.5) * bw / sw);
      sr = std::min(sr, r1);
      sc = std::min(sc, c1);
      if (!instance_mask[static_cast<std::size_t>(sr * g.width + sc)]) continue;
      const int dst = ((u + r) * g.width + (v + c)) * g.channels;
      const int src = (sr * g.width + sc) * g.channels;
      for (int ch = 0; ch < g.channels; ++ch) {
        out[static_cast<std::size_t>(dst + ch)] =
            instance[static_cast<std::size_t>(src + ch)];
      }
    }
  }
  return out;
}

Vec director_refine(const Predictor& erased, const Vec& composed,
                    const ConditionRef& phys_condition,
                    const NoiseSchedule& schedule, int t_can, double w,
                    Rng& rng) {
  if (t_can == 0) return composed;
  if (t_can < 0 || t_can > schedule.T) {
    throw std::invalid_argument("director_refine: t_can out of [0, T]");
  }
  const Vec eta = rng.normal_vec(composed.size());
  State noised = forward_diffuse(composed, t_can, eta, schedule);
  return sample_reverse_from(erased, std::move(noised), phys_condition,
                             schedule, w, rng);
}

ScoredCandidate referee_score(const ConceptWorld& world, Candidate candidate,
                              const ConceptId& erased_target, double lambda,
                              const RealismReference& realism) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("referee_score: lambda must be in [0, 1]");
  }
  const auto posterior = classify(world, candidate.image);
  const double fidelity = posterior.at(erased_target);
  const double ll = log_likelihood(world, candidate.image);
  double r = (ll - realism.lo) / (realism.hi - realism.lo);
  r = std::clamp(r, 0.0, 1.0);
  ScoredCandidate sc;
  sc.candidate = std::move(candidate);
  sc.score = lambda * fidelity + (1.0 - lambda) * r;
  return sc;
}

SelectionResult referee_rank_select(std::vector<ScoredCandidate> scored, int N) {
  if (N < 1) throw std::invalid_argument("referee_rank_select: N must be >= 1");
  std::sort(scored.begin(), scored.end(),
            [](const ScoredCandidate& a, const ScoredCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              const auto& pa = a.candidate.provenance;
              const auto& pb = b.candidate.provenance;
              if (pa.k != pb.k) return pa.k < pb.k;
              return pa.j < pb.j;
            });
  SelectionResult res;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    scored[i].rank = static_cast<int>(i) + 1;
  }
  res.truncated = N > static_cast<int>(scored.size());
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(N), scored.size());
  res.selected.assign(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep));
  res.ranked = std::move(scored);
  return res;
}

}  // namespace glyphlab
