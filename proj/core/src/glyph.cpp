#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "glyphlab/concept_world.hpp"

namespace glyphlab {

namespace {

struct PixelTest {
  virtual ~PixelTest() = default;
  virtual bool inside(double r, double c) const = 0;
};

struct DiskTest final : PixelTest {
  double cr, cc, rad;
  bool inside(double r, double c) const override {
    const double dr = r - cr, dc = c - cc;
    return dr * dr + dc * dc <= rad * rad;
  }
};

struct RingTest final : PixelTest {
  double cr, cc, outer, inner;
  bool inside(double r, double c) const override {
    const double dr = r - cr, dc = c - cc;
    const double q = dr * dr + dc * dc;
    return q <= outer * outer && q > inner * inner;
  }
};

struct BarTest final : PixelTest {
  double cr, cc, hh, hw;
  bool inside(double r, double c) const override {
    return std::abs(r - cr) <= hh && std::abs(c - cc) <= hw;
  }
};

struct CrossTest final : PixelTest {
  double cr, cc, arm, thick;
  bool inside(double r, double c) const override {
    const double dr = std::abs(r - cr), dc = std::abs(c - cc);
    return (dr <= thick && dc <= arm) || (dc <= thick && dr <= arm);
  }
};

struct TriangleTest final : PixelTest {
  std::array<std::array<double, 2>, 3> v;
  static double cross(double ar, double ac, double br, double bc) {
    return ar * bc - ac * br;
  }
  bool inside(double r, double c) const override {
    // sign of the point against each edge; inside when all agree
    double s[3];
    for (int i = 0; i < 3; ++i) {
      const auto& a = v[static_cast<std::size_t>(i)];
      const auto& b = v[static_cast<std::size_t>((i + 1) % 3)];
      s[i] = cross(b[0] - a[0], b[1] - a[1], r - a[0], c - a[1]);
    }
    const bool has_neg = s[0] < 0 || s[1] < 0 || s[2] < 0;
    const bool has_pos = s[0] > 0 || s[1] > 0 || s[2] > 0;
    return !(has_neg && has_pos);
  }
};

// bounding box in grid coordinates, used for the overflow check
struct Box {
  double r0, r1, c0, c1;
};

Box shape_box(const GlyphConceptSpec& s, double cr, double cc) {
  if (s.shape == "disk") return {cr - s.radius, cr + s.radius, cc - s.radius, cc + s.radius};
  if (s.shape == "ring") return {cr - s.radius, cr + s.radius, cc - s.radius, cc + s.radius};
  if (s.shape == "bar")
    return {cr - s.half_height, cr + s.half_height, cc - s.half_width, cc + s.half_width};
  if (s.shape == "cross") return {cr - s.radius, cr + s.radius, cc - s.radius, cc + s.radius};
  if (s.shape == "triangle") {
    Box b{s.vertices[0][0], s.vertices[0][0], s.vertices[0][1], s.vertices[0][1]};
    for (const auto& v : s.vertices) {
      b.r0 = std::min(b.r0, v[0]);
      b.r1 = std::max(b.r1, v[0]);
      b.c0 = std::min(b.c0, v[1]);
      b.c1 = std::max(b.c1, v[1]);
    }
    return b;
  }
  throw std::invalid_argument("make_glyph_world: unknown shape tag '" + s.shape + "'");
}

}  // namespace

ConceptWorld make_glyph_world(const GlyphWorldSpec& spec) {
  const GridShape g = spec.grid;
  if (g.height <= 0 || g.width <= 0 || g.channels <= 0) {
    throw std::invalid_argument("make_glyph_world: bad grid shape");
  }
  if (g.channels != 1 && g.channels != 3) {
    throw std::invalid_argument("make_glyph_world: channels must be 1 or 3");
  }
  if (spec.concepts.empty()) {
    throw std::invalid_argument("make_glyph_world: needs at least one concept");
  }

  double wsum = 0.0;
  for (const auto& cs : spec.concepts) {
    if (!(cs.weight > 0.0)) {
      throw std::invalid_argument("make_glyph_world: weights must be positive");
    }
    wsum += cs.weight;
  }

  std::vector<Concept> concepts;
  concepts.reserve(spec.concepts.size());

  for (const auto& cs : spec.concepts) {
    const double cr = cs.center_row >= 0 ? cs.center_row : (g.height - 1) / 2.0;
    const double cc = cs.center_col >= 0 ? cs.center_col : (g.width - 1) / 2.0;

    const Box box = shape_box(cs, cr, cc);
    if (box.r0 < -0.5 || box.c0 < -0.5 || box.r1 > g.height - 0.5 ||
        box.c1 > g.width - 0.5) {
      throw std::invalid_argument("make_glyph_world: shape for '" + cs.id +
                                  "' overflows the grid");
    }

    std::unique_ptr<PixelTest> test;
    if (cs.shape == "disk") {
      auto t = std::make_unique<DiskTest>();
      t->cr = cr; t->cc = cc; t->rad = cs.radius;
      test = std::move(t);
    } else if (cs.shape == "ring") {
      auto t = std::make_unique<RingTest>();
      t->cr = cr; t->cc = cc; t->outer = cs.radius; t->inner = cs.inner_radius;
      test = std::move(t);
    } else if (cs.shape == "bar") {
      auto t = std::make_unique<BarTest>();
      t->cr = cr; t->cc = cc; t->hh = cs.half_height; t->hw = cs.half_width;
      test = std::move(t);
    } else if (cs.shape == "cross") {
      auto t = std::make_unique<CrossTest>();
      t->cr = cr; t->cc = cc; t->arm = cs.radius; t->thick = cs.thickness;
      test = std::move(t);
    } else if (cs.shape == "triangle") {
      auto t = std::make_unique<TriangleTest>();
      t->v = cs.vertices;
      test = std::move(t);
    } else {
      throw std::invalid_argument("make_glyph_world: unknown shape tag '" + cs.shape + "'");
    }

    Concept c;
    c.id = cs.id;
    c.spread = cs.spread;
    c.weight = cs.weight / wsum;
    c.attributes.shape_class = cs.shape;
    c.attributes.color = cs.color;
    c.attributes.adjectives = cs.adjectives;
    c.attributes.contexts = cs.contexts;
    c.mean.assign(static_cast<std::size_t>(g.size()), spec.background);

    int fg = 0;
    for (int r = 0; r < g.height; ++r) {
      for (int col = 0; col < g.width; ++col) {
        if (!test->inside(static_cast<double>(r), static_cast<double>(col))) continue;
        ++fg;
        const int p = (r * g.width + col) * g.channels;
        for (int ch = 0; ch < g.channels; ++ch) {
          c.mean[static_cast<std::size_t>(p + ch)] =
              g.channels == 3 ? cs.color[static_cast<std::size_t>(ch)]
                              : (cs.color[0] + cs.color[1] + cs.color[2]) / 3.0;
        }
      }
    }
    if (fg == 0) {
      throw std::invalid_argument("make_glyph_world: shape for '" + cs.id +
                                  "' rasterizes to no pixels");
    }
    concepts.push_back(std::move(c));
  }

  return ConceptWorld(std::move(concepts), g.size(), g, spec.background);
}

}  // namespace glyphlab
