#pragma once

#include "sres/core.hpp"
#include "sres/solver.hpp"

#include <utility>
#include <vector>

namespace sres {

/// Grid of viewing directions for the diffuser-off modes.
struct ViewGrid {
    int cols = 5;
    int rows = 3;
    double step_x = 0.0;  // degrees between horizontally adjacent views
    double step_y = 0.0;

    /// (nu_x, nu_y) in degrees, row-major, centred on the display normal.
    std::vector<std::pair<double, double>> angles() const;
    int size() const { return cols * rows; }
};

/// 5 x 3 views spaced so adjacent views shift the rear-panel ray by one pixel.
ViewGrid default_view_grid(const DisplayGeometry& geom);

/// The same panels with the diffuser switched off: panel-resolution grid, rays
/// parameterized on the front panel.
DisplayGeometry diffuser_off(const DisplayGeometry& geom);

/// Rear pixel hit by the ray leaving front pixel `front` toward (nu_x, nu_y), or -1.
int rear_pixel_of_ray(const DisplayGeometry& geom, int front, double nu_x, double nu_y);

/// Light-field target with one entry per (front, rear) ray of every view. Entries seen by
/// several views carry the mean of their values; all weights are 1.
WeightedLightField build_lightfield_target(const std::vector<Plane>& views, const DisplayGeometry& geom,
                                           const ViewGrid& grid);

/// Same image in every direction.
WeightedLightField build_uniform_lightfield_target(const Plane& image, const DisplayGeometry& geom,
                                                   const ViewGrid& grid);

/// Weighted bounded rank-K factorization of a light-field target, cfg.outer_iters alternations.
FactorizationResult decompose_3d(const WeightedLightField& target, int rank, const SolverConfig& cfg,
                                 double lower_bound = 0.0);

struct HdrResult {
    PatternSet patterns;
    std::vector<double> objective;
    int unreachable_pixels = 0;  // image values below black_level^2
};

HdrResult decompose_hdr(const Plane& image, int rank, double black_level, const DisplayGeometry& geom,
                        const ViewGrid& grid, const SolverConfig& cfg);

/// On-axis perceived image (1/K) sum_k F[a,k] G[a,k] on the panel grid.
Plane simulate_hdr(const PatternSet& pat, const DisplayGeometry& geom);

/// A single conventional panel with the given black level.
Plane simulate_single_panel(const Plane& image, double black_level);

/// Per-view PSNR of the emitted light field against the target views, over the pixels
/// whose rays hit both panels.
std::vector<double> view_psnr(const PatternSet& pat, const std::vector<Plane>& views, const DisplayGeometry& geom,
                              const ViewGrid& grid);

/// Textured background plane behind an occluding textured disc, both between the panels,
/// rendered for every view of the grid at panel resolution.
std::vector<Plane> two_plane_scene(const DisplayGeometry& geom, const ViewGrid& grid);

} // namespace sres
