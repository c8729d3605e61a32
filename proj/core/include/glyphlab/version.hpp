#pragma once

namespace glyphlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace glyphlab
