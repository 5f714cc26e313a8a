#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "symgen/geometry.hpp"

namespace symgen {

/// Single-channel float image, row-major (row = y, col = x).
using Plane = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mask8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Samples per pixel side; coverage is quantized to 1/(kSupersample^2).
inline constexpr int kSupersample = 4;

/// Scanline fill of a pixel-space outline (x right, y down) with the nonzero
/// winding rule. Returns per-pixel coverage in [0, 1].
Plane rasterize(const Outline& outline, int height, int width);

/// Coverage to 8-bit (round half up).
Mask8 to_mask8(const Plane& coverage);

}  // namespace symgen
