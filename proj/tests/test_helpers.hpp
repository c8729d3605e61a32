#pragma once

#include "glyphlab/concept_world.hpp"

namespace testing {

using namespace glyphlab;

/// Small non-glyph worlds for oracle-heavy unit tests.
inline ConceptWorld tiny_world_1d(double mean = 0.0, double spread = 1.0) {
  Concept c;
  c.id = "only";
  c.mean = {mean};
  c.spread = spread;
  c.weight = 1.0;
  return ConceptWorld({c}, 1);
}

inline ConceptWorld tiny_world_2d() {
  Concept a, b, c;
  a.id = "alpha";
  a.mean = {3.0, 0.0};
  a.spread = 0.2;
  a.weight = 0.5;
  b.id = "beta";
  b.mean = {-3.0, 0.5};
  b.spread = 0.3;
  b.weight = 0.3;
  c.id = "gamma";
  c.mean = {0.0, -4.0};
  c.spread = 0.1;
  c.weight = 0.2;
  return ConceptWorld({a, b, c}, 2);
}

inline ConceptWorld delta_world_2d() {
  Concept c;
  c.id = "point";
  c.mean = {1.5, -2.0};
  c.spread = 0.0;
  c.weight = 1.0;
  return ConceptWorld({c}, 2);
}

}  // namespace testing
