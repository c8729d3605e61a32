#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glyphlab/predictor.hpp"
#include "glyphlab/rng.hpp"
#include "glyphlab/schedule.hpp"
#include "glyphlab/types.hpp"

namespace glyphlab {

struct ConceptAttributes {
  std::string shape_class;
  std::array<double, 3> color{0.5, 0.5, 0.5};
  std::vector<std::string> adjectives;
  std::vector<std::string> contexts;
};

/// One mixture component: an isotropic Gaussian around `mean` with standard
/// deviation `spread`, plus the attribute record the agents reason over.
struct Concept {
  ConceptId id;
  Vec mean;
  double spread = 0.0;
  double weight = 0.0;
  ConceptAttributes attributes;
};

struct GridShape {
  int height = 0;
  int width = 0;
  int channels = 0;
  int pixels() const { return height * width; }
  int size() const { return height * width * channels; }
};

/// Gaussian-mixture universe of labeled concepts. Immutable after
/// construction; the source of exact noise predictors, samplers and Bayes
/// classifiers.
class ConceptWorld {
 public:
  ConceptWorld(std::vector<Concept> concepts, int dimension,
               std::optional<GridShape> glyph_shape = std::nullopt,
               double background = 0.5);

  const std::vector<Concept>& concepts() const { return concepts_; }
  int dimension() const { return dimension_; }
  const std::optional<GridShape>& glyph_shape() const { return glyph_shape_; }
  double background() const { return background_; }

  bool has_concept(const ConceptId& id) const;
  const Concept& concept_by_id(const ConceptId& id) const;
  std::size_t index_of(const ConceptId& id) const;

  double max_spread() const;

  /// Per-coordinate mean and standard deviation of the mixture, in closed
  /// form. Used by the whitened-prototype similarity metric.
  void mixture_moments(Vec& mean, Vec& stddev) const;

 private:
  std::vector<Concept> concepts_;
  int dimension_ = 0;
  std::optional<GridShape> glyph_shape_;
  double background_ = 0.5;
  std::map<ConceptId, std::size_t> index_;
};

/// Draw from N(mean_c, spread_c^2 I). Values are not clamped.
Vec sample_data(const ConceptWorld& world, const ConceptId& id, Rng& rng);

/// Bayes-optimal noise estimate E[eps | x_t, condition].
///
/// Single concept c: eps* = sqrt(1-abar_t) (x_t - sqrt(abar_t) mu_c) / v_c
/// with v_c = abar_t s_c^2 + 1 - abar_t. Null condition: responsibility-
/// weighted mixture of the per-concept estimates, responsibilities
/// proportional to weight_c N(x_t; sqrt(abar_t) mu_c, v_c I).
Vec true_eps(const ConceptWorld& world, const State& state,
             const ConditionRef& condition, const NoiseSchedule& schedule);

/// Bayes posterior over concepts for clean data (t = 0).
std::map<ConceptId, double> classify(const ConceptWorld& world, const Vec& x0);

ConceptId classify_top1(const ConceptWorld& world, const Vec& x0);

/// Log of the mixture density at x0. Returns -inf off the support of a
/// delta (spread = 0) component when no positive-spread component covers x0.
double log_likelihood(const ConceptWorld& world, const Vec& x0);

/// Time-t log marginal density log p_t(x | condition); the finite-difference
/// score oracle differentiates this. Null condition uses the full mixture.
double log_density_at(const ConceptWorld& world, const State& state,
                      const ConditionRef& condition,
                      const NoiseSchedule& schedule);

/// The world's exact predictor, exposed behind the black-box surface.
PredictorPtr world_predictor(const ConceptWorld& world);

/// Whitened prototype cosine, scaled by 100: cosine between the image and
/// the target concept's mean after per-coordinate whitening by the mixture
/// moments. This artifact's similarity analogue; it is not CLIP.
double prototype_similarity(const ConceptWorld& world, const Vec& image,
                            const ConceptId& target);

// ---------------------------------------------------------------------------
// glyph worlds

struct GlyphConceptSpec {
  ConceptId id;
  std::string shape;  // disk | bar | cross | ring | triangle
  std::array<double, 3> color{0.5, 0.5, 0.5};
  double spread = 0.05;
  double weight = 1.0;
  std::vector<std::string> adjectives;
  std::vector<std::string> contexts;

  // geometry; row/col are grid coordinates, defaults center the shape
  double center_row = -1.0;
  double center_col = -1.0;
  double radius = 4.0;        // disk, ring (outer), cross arm length
  double inner_radius = 2.0;  // ring
  double half_height = 2.0;   // bar
  double half_width = 6.0;    // bar
  double thickness = 1.0;     // cross
  // triangle vertices (row, col); used when shape == "triangle"
  std::array<std::array<double, 2>, 3> vertices{{{0, 0}, {0, 0}, {0, 0}}};
};

struct GlyphWorldSpec {
  GridShape grid{16, 16, 3};
  double background = 0.5;
  std::vector<GlyphConceptSpec> concepts;
};

/// Rasterizes each concept spec into a mean image on the neutral background.
/// Weights may be given unnormalized; they are normalized to sum to 1.
/// Throws on unknown shape tags and on shapes that overflow the grid.
ConceptWorld make_glyph_world(const GlyphWorldSpec& spec);

/// Threshold segmentation: a pixel is foreground when any of its channels
/// deviates from the background by more than the threshold.
constexpr double kSegmentationThreshold = 0.2;

std::vector<std::uint8_t> segment_foreground(const ConceptWorld& world,
                                             const Vec& image);

int foreground_count(const std::vector<std::uint8_t>& mask);

}  // namespace glyphlab
