#pragma once

#include "glyphlab/concept_world.hpp"

namespace glyphlab {

/// The well-separated 16x16x3 glyph preset used by the acceptance runs:
/// six concepts (three same-center disks, a bar, and two field-like context
/// glyphs) with pairwise mean distances of at least ten times the largest
/// spread.
GlyphWorldSpec well_separated_spec();

ConceptWorld well_separated_world();

}  // namespace glyphlab
