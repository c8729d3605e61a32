#pragma once

#include <string>

#include "glyphlab/concept_world.hpp"
#include "glyphlab/types.hpp"

namespace glyphlab {

/// Text raster dump: a "glyr <height> <width> <channels>" header line
/// followed by one "%.17g" value per line, row-major. Uncompressed and
/// diff-able.
void write_raster(const std::string& path, const Vec& image, const GridShape& shape);

struct Raster {
  Vec image;
  GridShape shape;
};

Raster read_raster(const std::string& path);

/// 8-bit preview: binary PPM (P6) for 3-channel rasters, PGM (P5) for
/// single-channel. Values are clamped to [0, 1] for display only.
void write_preview(const std::string& path, const Vec& image, const GridShape& shape);

}  // namespace glyphlab
