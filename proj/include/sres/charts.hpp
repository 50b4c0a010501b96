#pragma once

#include "sres/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sres::charts {

/// Near-vertical edge tilted by `angle` degrees, dark on the left. With blur_sigma == 0
/// pixels carry their exact area coverage (16x16 supersampling); otherwise the edge is a
/// Gaussian-blurred step (sigma in pixels) point-sampled at pixel centres.
Plane slanted_edge(int cols, int rows, double angle, double dark = 0.2, double bright = 0.8, double blur_sigma = 0.0);

/// Horizontal linear chirp 0.5 + 0.5 cos(phase) whose frequency ramps from 0 to
/// max_cycles cycles per panel pixel across the width. `sr_factor` is target pixels per panel pixel.
Plane chirp(int cols, int rows, double sr_factor, double max_cycles = 3.0);

Plane checkerboard(int cols, int rows, int cell);

/// Isotropic 1/f-amplitude noise scaled into [0.05, 0.95].
Plane pink_noise(int cols, int rows, std::uint64_t seed);

/// Antialiased discs, boxes and thin strokes over a shaded background with fine texture.
Plane shapes_scene(int cols, int rows, std::uint64_t seed);

/// Oriented gratings at several scales modulated by smooth noise.
Plane texture_scene(int cols, int rows, std::uint64_t seed);

/// Deterministic natural-image stand-ins, indices 0..natural_image_count()-1.
int natural_image_count();
std::string natural_image_name(int index);
Plane natural_image(int index, int cols, int rows);

/// Horizontal ramp in the top half, pure black and pure white blocks in the bottom half.
Plane hdr_test_image(int cols, int rows);

} // namespace sres::charts
