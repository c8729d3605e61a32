#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace glyphlab {

/// Minimal CSV writer with deterministic float formatting.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }

  CsvWriter& field(const std::string& v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& field(const char* v) { return field(std::string(v)); }
  CsvWriter& field(int v) { return field(std::to_string(v)); }
  CsvWriter& field(std::uint64_t v) { return field(std::to_string(v)); }
  CsvWriter& field(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return field(std::string(buf));
  }

  void endrow() {
    out_ << "\n";
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }

  std::ofstream out_;
  bool first_ = true;
};

}  // namespace glyphlab
