#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "glyphlab/types.hpp"

namespace glyphlab {

/// FNV-1a over arbitrary bytes; used to derive per-stage seeds and to
/// checksum artifacts.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

/// Deterministic seed for one pipeline stage: hash(master, stage, k, j).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                                 std::uint64_t k = 0, std::uint64_t j = 0) {
  std::uint64_t h = fnv1a64(&master, sizeof(master));
  h = fnv1a64(stage, h);
  h = fnv1a64(&k, sizeof(k), h);
  h = fnv1a64(&j, sizeof(j), h);
  return h ? h : 0x9e3779b97f4a7c15ull;
}

/// Seeded random source. Normal draws use Box-Muller on explicit uniforms so
/// the stream depends only on the mt19937_64 sequence, which the standard
/// pins exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on (0,1), never 0 or 1.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(std::size_t n) {
    Vec v(n);
    for (auto& x : v) x = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace glyphlab
