#pragma once

#include "sres/core.hpp"

#include <utility>
#include <vector>

namespace sres {

/// Box-downsample to the panel grid, then Keys (a = -0.5) bicubic upsampling with
/// clamped borders.
Plane baseline_cubic(const Plane& target, const DisplayGeometry& geom);

/// Superpixel offsets (dx, dy) in [0, s)^2 for K wobulated subframes: greedy farthest-point
/// selection on the torus of phases starting at (0, 0).
std::vector<std::pair<int, int>> wobulation_shifts(int frames, int sr_factor);

/// Average of the subframes, each replicated to the target grid after shifting by its offset
/// (edge pixels clamped).
Plane wobulation_render(const std::vector<Plane>& subframes, const std::vector<std::pair<int, int>>& shifts,
                        const DisplayGeometry& geom);

struct WobulationResult {
    Plane perceived;
    std::vector<Plane> subframes;
    std::vector<std::pair<int, int>> shifts;
};

/// Least-squares subframes in [0, 1] for K shifted low-resolution frames (projected SART).
/// Requires an integer sr_factor and 1 <= K <= sr_factor^2.
WobulationResult baseline_wobulation(const Plane& target, int frames, const DisplayGeometry& geom, int iterations = 300);

} // namespace sres
