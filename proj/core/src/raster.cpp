#include "glyphlab/raster.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace glyphlab {

void write_raster(const std::string& path, const Vec& image, const GridShape& shape) {
  if (static_cast<int>(image.size()) != shape.size()) {
    throw std::invalid_argument("write_raster: image size does not match shape");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_raster: cannot open " + path);
  out << "glyr " << shape.height << " " << shape.width << " " << shape.channels << "\n";
  char buf[64];
  for (double v : image) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_raster: write failed for " + path);
}

Raster read_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_raster: cannot open " + path);
  std::string magic;
  Raster r;
  in >> magic >> r.shape.height >> r.shape.width >> r.shape.channels;
  if (!in || magic != "glyr") {
    throw std::runtime_error("read_raster: bad header in " + path);
  }
  r.image.resize(static_cast<std::size_t>(r.shape.size()));
  for (auto& v : r.image) {
    if (!(in >> v)) throw std::runtime_error("read_raster: truncated data in " + path);
  }
  return r;
}

void write_preview(const std::string& path, const Vec& image, const GridShape& shape) {
  if (static_cast<int>(image.size()) != shape.size()) {
    throw std::invalid_argument("write_preview: image size does not match shape");
  }
  if (shape.channels != 1 && shape.channels != 3) {
    throw std::invalid_argument("write_preview: channels must be 1 or 3");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_preview: cannot open " + path);
  out << (shape.channels == 3 ? "P6" : "P5") << "\n"
      << shape.width << " " << shape.height << "\n255\n";
  for (double v : image) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(c * 255.0 + 0.5)));
  }
  if (!out) throw std::runtime_error("write_preview: write failed for " + path);
}

}  // namespace glyphlab
