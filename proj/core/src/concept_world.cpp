#include "glyphlab/concept_world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "glyphlab/vec.hpp"

namespace glyphlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_gaussian_iso(const Vec& x, const Vec& mean, double var) {
  // var = 0 handled by callers
  const double d = static_cast<double>(x.size());
  const double q = squared_distance(x, mean);
  return -0.5 * (d * std::log(2.0 * std::numbers::pi * var) + q / var);
}

// log N(x; scale*mean, var I) in one pass, no temporaries
double log_gaussian_scaled(const Vec& x, const Vec& mean, double scale,
                           double var) {
  double q = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - scale * mean[i];
    q += d * d;
  }
  const double n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi * var) + q / var);
}

}  // namespace

ConceptWorld::ConceptWorld(std::vector<Concept> concepts, int dimension,
                           std::optional<GridShape> glyph_shape,
                           double background)
    : concepts_(std::move(concepts)),
      dimension_(dimension),
      glyph_shape_(glyph_shape),
      background_(background) {
  if (concepts_.empty()) {
    throw std::invalid_argument("ConceptWorld: needs at least one concept");
  }
  if (glyph_shape_ && glyph_shape_->size() != dimension_) {
    throw std::invalid_argument("ConceptWorld: glyph shape does not match dimension");
  }
  double wsum = 0.0;
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    const Concept& c = concepts_[i];
    if (static_cast<int>(c.mean.size()) != dimension_) {
      throw std::invalid_argument("ConceptWorld: concept '" + c.id +
                                  "' mean has wrong dimension");
    }
    if (!all_finite(c.mean)) {
      throw std::invalid_argument("ConceptWorld: concept '" + c.id + "' mean not finite");
    }
    if (!(c.weight > 0.0)) {
      throw std::invalid_argument("ConceptWorld: concept '" + c.id + "' weight must be > 0");
    }
    if (!(c.spread >= 0.0)) {
      throw std::invalid_argument("ConceptWorld: concept '" + c.id + "' spread must be >= 0");
    }
    for (double ch : c.attributes.color) {
      if (!(ch >= 0.0 && ch <= 1.0)) {
        throw std::invalid_argument("ConceptWorld: concept '" + c.id +
                                    "' color outside [0,1]");
      }
    }
    if (!index_.emplace(c.id, i).second) {
      throw std::invalid_argument("ConceptWorld: duplicate concept id '" + c.id + "'");
    }
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("ConceptWorld: weights must sum to 1");
  }
}

bool ConceptWorld::has_concept(const ConceptId& id) const {
  return index_.count(id) > 0;
}

const Concept& ConceptWorld::concept_by_id(const ConceptId& id) const {
  return concepts_[index_of(id)];
}

std::size_t ConceptWorld::index_of(const ConceptId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw std::invalid_argument("ConceptWorld: unknown concept id '" + id + "'");
  }
  return it->second;
}

double ConceptWorld::max_spread() const {
  double m = 0.0;
  for (const auto& c : concepts_) m = std::max(m, c.spread);
  return m;
}

void ConceptWorld::mixture_moments(Vec& mean, Vec& stddev) const {
  mean.assign(static_cast<std::size_t>(dimension_), 0.0);
  stddev.assign(static_cast<std::size_t>(dimension_), 0.0);
  for (const auto& c : concepts_) {
    for (int i = 0; i < dimension_; ++i) {
      mean[static_cast<std::size_t>(i)] += c.weight * c.mean[static_cast<std::size_t>(i)];
    }
  }
  for (const auto& c : concepts_) {
    for (int i = 0; i < dimension_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double d = c.mean[ui] - mean[ui];
      stddev[ui] += c.weight * (c.spread * c.spread + d * d);
    }
  }
  for (auto& v : stddev) v = std::sqrt(v);
}

Vec sample_data(const ConceptWorld& world, const ConceptId& id, Rng& rng) {
  const Concept& c = world.concept_by_id(id);
  Vec x = c.mean;
  if (c.spread > 0.0) {
    for (auto& v : x) v += c.spread * rng.normal();
  }
  return x;
}

namespace {

// log weight_c + log N(x_t; sqrt(abar) mu_c, v_c I) per concept, with the
// spread = 0 case collapsing to the pure-noise variance.
std::vector<double> component_log_joint(const ConceptWorld& world,
                                        const State& state,
                                        const NoiseSchedule& schedule) {
  const double abar = schedule.alpha_bar[static_cast<std::size_t>(state.t)];
  const double a = std::sqrt(abar);
  std::vector<double> lj;
  lj.reserve(world.concepts().size());
  for (const auto& c : world.concepts()) {
    const double v = abar * c.spread * c.spread + 1.0 - abar;
    lj.push_back(std::log(c.weight) + log_gaussian_scaled(state.x, c.mean, a, v));
  }
  return lj;
}

std::vector<double> softmax_from_log(const std::vector<double>& lj) {
  const double m = *std::max_element(lj.begin(), lj.end());
  std::vector<double> r(lj.size(), 0.0);
  if (m == kNegInf) return r;
  double z = 0.0;
  for (std::size_t i = 0; i < lj.size(); ++i) {
    r[i] = std::exp(lj[i] - m);
    z += r[i];
  }
  for (auto& v : r) v /= z;
  return r;
}

Vec conditional_eps(const Concept& c, const State& state, double abar) {
  const double v = abar * c.spread * c.spread + 1.0 - abar;
  const double a = std::sqrt(abar);
  const double b = std::sqrt(1.0 - abar);
  Vec e(state.x.size());
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    e[i] = b * (state.x[i] - a * c.mean[i]) / v;
  }
  return e;
}

}  // namespace

Vec true_eps(const ConceptWorld& world, const State& state,
             const ConditionRef& condition, const NoiseSchedule& schedule) {
  if (state.t < 1 || state.t > schedule.T) {
    throw std::invalid_argument("true_eps: t out of [1, T]");
  }
  if (static_cast<int>(state.x.size()) != world.dimension()) {
    throw std::invalid_argument("true_eps: state dimension mismatch");
  }
  const double abar = schedule.alpha_bar[static_cast<std::size_t>(state.t)];

  if (!condition.is_null()) {
    return conditional_eps(world.concept_by_id(condition.id()), state, abar);
  }

  const auto lj = component_log_joint(world, state, schedule);
  const auto resp = softmax_from_log(lj);
  const double a = std::sqrt(abar);
  const double b = std::sqrt(1.0 - abar);
  Vec e(state.x.size(), 0.0);
  for (std::size_t c = 0; c < world.concepts().size(); ++c) {
    if (resp[c] == 0.0) continue;
    const Concept& cc = world.concepts()[c];
    const double v = abar * cc.spread * cc.spread + 1.0 - abar;
    const double coef = resp[c] * b / v;
    for (std::size_t i = 0; i < e.size(); ++i) {
      e[i] += coef * (state.x[i] - a * cc.mean[i]);
    }
  }
  return e;
}

std::map<ConceptId, double> classify(const ConceptWorld& world, const Vec& x0) {
  if (static_cast<int>(x0.size()) != world.dimension()) {
    throw std::invalid_argument("classify: dimension mismatch");
  }
  std::vector<double> lj;
  lj.reserve(world.concepts().size());
  for (const auto& c : world.concepts()) {
    if (c.spread == 0.0) {
      // delta component: on-support iff x0 equals the mean exactly
      lj.push_back(x0 == c.mean ? std::numeric_limits<double>::infinity() : kNegInf);
    } else {
      lj.push_back(std::log(c.weight) +
                   log_gaussian_iso(x0, c.mean, c.spread * c.spread));
    }
  }
  // an exact delta hit dominates everything else
  std::vector<double> probs;
  const bool delta_hit =
      std::any_of(lj.begin(), lj.end(),
                  [](double v) { return v == std::numeric_limits<double>::infinity(); });
  if (delta_hit) {
    probs.assign(lj.size(), 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < lj.size(); ++i) {
      if (lj[i] == std::numeric_limits<double>::infinity()) {
        probs[i] = world.concepts()[i].weight;
        n += probs[i];
      }
    }
    for (auto& p : probs) p /= n;
  } else {
    probs = softmax_from_log(lj);
  }
  std::map<ConceptId, double> out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[world.concepts()[i].id] = probs[i];
  }
  return out;
}

ConceptId classify_top1(const ConceptWorld& world, const Vec& x0) {
  const auto post = classify(world, x0);
  const Concept* best = nullptr;
  double bp = -1.0;
  for (const auto& c : world.concepts()) {
    const double p = post.at(c.id);
    if (p > bp) {
      bp = p;
      best = &c;
    }
  }
  return best->id;
}

double log_likelihood(const ConceptWorld& world, const Vec& x0) {
  if (static_cast<int>(x0.size()) != world.dimension()) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  std::vector<double> lj;
  for (const auto& c : world.concepts()) {
    if (c.spread == 0.0) {
      // documented sentinel: a delta component contributes -inf off-support
      lj.push_back(kNegInf);
    } else {
      lj.push_back(std::log(c.weight) +
                   log_gaussian_iso(x0, c.mean, c.spread * c.spread));
    }
  }
  const double m = *std::max_element(lj.begin(), lj.end());
  if (m == kNegInf) return kNegInf;
  double z = 0.0;
  for (double v : lj) z += std::exp(v - m);
  return m + std::log(z);
}

double log_density_at(const ConceptWorld& world, const State& state,
                      const ConditionRef& condition,
                      const NoiseSchedule& schedule) {
  if (state.t < 1 || state.t > schedule.T) {
    throw std::invalid_argument("log_density_at: t out of [1, T]");
  }
  const double abar = schedule.alpha_bar[static_cast<std::size_t>(state.t)];
  if (!condition.is_null()) {
    const Concept& c = world.concept_by_id(condition.id());
    const double v = abar * c.spread * c.spread + 1.0 - abar;
    return log_gaussian_scaled(state.x, c.mean, std::sqrt(abar), v);
  }
  const auto lj = component_log_joint(world, state, schedule);
  const double m = *std::max_element(lj.begin(), lj.end());
  double z = 0.0;
  for (double v : lj) z += std::exp(v - m);
  return m + std::log(z);
}

namespace {

class WorldPredictor final : public Predictor {
 public:
  explicit WorldPredictor(ConceptWorld world) : world_(std::move(world)) {}

  Vec eps(const State& state, const ConditionRef& condition,
          const NoiseSchedule& schedule) const override {
    return true_eps(world_, state, condition, schedule);
  }

  std::string label() const override { return "base"; }

 private:
  ConceptWorld world_;
};

}  // namespace

PredictorPtr world_predictor(const ConceptWorld& world) {
  return std::make_shared<WorldPredictor>(world);
}

double prototype_similarity(const ConceptWorld& world, const Vec& image,
                            const ConceptId& target) {
  if (static_cast<int>(image.size()) != world.dimension()) {
    throw std::invalid_argument("prototype_similarity: dimension mismatch");
  }
  Vec mean, sd;
  world.mixture_moments(mean, sd);
  const Vec& proto = world.concept_by_id(target).mean;
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double s = sd[i] > 0.0 ? sd[i] : 1.0;
    const double a = (image[i] - mean[i]) / s;
    const double b = (proto[i] - mean[i]) / s;
    xy += a * b;
    xx += a * a;
    yy += b * b;
  }
  if (xx == 0.0 || yy == 0.0) return 0.0;
  return 100.0 * xy / (std::sqrt(xx) * std::sqrt(yy));
}

std::vector<std::uint8_t> segment_foreground(const ConceptWorld& world,
                                             const Vec& image) {
  if (!world.glyph_shape()) {
    throw std::logic_error("segment_foreground: world has no glyph shape");
  }
  const GridShape g = *world.glyph_shape();
  if (static_cast<int>(image.size()) != g.size()) {
    throw std::invalid_argument("segment_foreground: image size mismatch");
  }
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.pixels()), 0);
  const double bg = world.background();
  for (int p = 0; p < g.pixels(); ++p) {
    for (int ch = 0; ch < g.channels; ++ch) {
      const double v = image[static_cast<std::size_t>(p * g.channels + ch)];
      if (std::abs(v - bg) > kSegmentationThreshold) {
        mask[static_cast<std::size_t>(p)] = 1;
        break;
      }
    }
  }
  return mask;
}

int foreground_count(const std::vector<std::uint8_t>& mask) {
  int n = 0;
  for (auto m : mask) n += m;
  return n;
}

}  // namespace glyphlab
