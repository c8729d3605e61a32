#include "glyphlab/preset.hpp"

namespace glyphlab {

GlyphWorldSpec well_separated_spec() {
  GlyphWorldSpec spec;
  spec.grid = {16, 16, 3};
  spec.background = 0.5;

  GlyphConceptSpec ruby;
  ruby.id = "ruby_disk";
  ruby.shape = "disk";
  ruby.color = {0.95, 0.08, 0.08};
  ruby.radius = 4.2;
  ruby.adjectives = {"glossy"};
  ruby.contexts = {"meadow", "night_sky"};

  GlyphConceptSpec crimson;
  crimson.id = "crimson_disk";
  crimson.shape = "disk";
  crimson.color = {0.98, 0.02, 0.35};
  crimson.radius = 4.2;
  crimson.adjectives = {"glossy"};
  crimson.contexts = {"meadow"};

  GlyphConceptSpec pearl;
  pearl.id = "pearl_disk";
  pearl.shape = "disk";
  pearl.color = {0.92, 0.92, 0.92};
  pearl.radius = 4.2;
  pearl.contexts = {"meadow"};

  GlyphConceptSpec azure;
  azure.id = "azure_bar";
  azure.shape = "bar";
  azure.color = {0.10, 0.22, 0.90};
  azure.center_row = 8.0;
  azure.center_col = 8.0;
  azure.half_height = 2.0;
  azure.half_width = 5.5;
  azure.contexts = {"night_sky"};

  GlyphConceptSpec meadow;
  meadow.id = "meadow";
  meadow.shape = "triangle";
  meadow.color = {0.16, 0.52, 0.20};
  meadow.vertices = {{{15.0, 0.0}, {15.0, 15.0}, {6.0, 8.0}}};

  GlyphConceptSpec night;
  night.id = "night_sky";
  night.shape = "bar";
  night.color = {0.06, 0.06, 0.16};
  night.center_row = 4.5;
  night.center_col = 7.5;
  night.half_height = 4.5;
  night.half_width = 7.5;

  for (auto* c : {&ruby, &crimson, &pearl, &azure, &meadow, &night}) {
    c->spread = 0.05;
    c->weight = 1.0;
  }
  spec.concepts = {ruby, crimson, pearl, azure, meadow, night};
  return spec;
}

ConceptWorld well_separated_world() { return make_glyph_world(well_separated_spec()); }

}  // namespace glyphlab
