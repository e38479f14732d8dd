#pragma once

#include <cstddef>

#include "sigwin/image.hpp"

namespace sigwin {

struct Skeleton {
  BinaryImage image;
  std::size_t source_foreground_count = 0;
};

/// Zhang-Suen thinning run to convergence. Pixels outside the frame count as
/// background. Within each subiteration the flagged pixels are removed in
/// raster order and a pixel is kept if, at its turn, removing it would no
/// longer be topology-preserving (the 8-connected simple-point test). This
/// reproduces the classic parallel rule except on the configurations where
/// that rule breaks connectivity, e.g. an isolated 2x2 square, which thins to
/// its bottom-right pixel instead of vanishing.
Skeleton thin(const BinaryImage& img);

/// True when removing the foreground pixel at (x, y) changes neither the
/// 8-connected foreground topology nor the 4-connected background topology.
bool is_simple_point(const BinaryImage& img, int x, int y);

}  // namespace sigwin
