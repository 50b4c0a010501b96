#include "sres/display_modes.hpp"

#include "sres/forward_model.hpp"
#include "sres/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace sres {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

int rear_cell(double pos, double pitch, int count) {
    const int c = static_cast<int>(std::floor(pos / pitch));
    return (c < 0 || c >= count) ? -1 : c;
}

void check_panel_image(const Plane& image, const DisplayGeometry& geom) {
    if (image.cols() != geom.panel_cols || image.rows() != geom.panel_rows)
        throw std::invalid_argument("image must be at panel resolution");
}

} // namespace

std::vector<std::pair<double, double>> ViewGrid::angles() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out.emplace_back((c - 0.5 * (cols - 1)) * step_x, (r - 0.5 * (rows - 1)) * step_y);
    return out;
}

ViewGrid default_view_grid(const DisplayGeometry& geom) {
    const double step = std::atan(geom.panel_pitch / geom.gap_panels) / kDegToRad;
    return {5, 3, step, step};
}

DisplayGeometry diffuser_off(const DisplayGeometry& geom) {
    DisplayGeometry g = geom;
    g.sr_factor = 1.0;
    g.gap_diffuser = 0.0;
    return g;
}

int rear_pixel_of_ray(const DisplayGeometry& geom, int front, double nu_x, double nu_y) {
    const int fx = front % geom.panel_cols, fy = front / geom.panel_cols;
    const double p = geom.panel_pitch;
    const int rx = rear_cell((fx + 0.5) * p - geom.gap_panels * std::tan(nu_x * kDegToRad), p, geom.panel_cols);
    const int ry = rear_cell((fy + 0.5) * p - geom.gap_panels * std::tan(nu_y * kDegToRad), p, geom.panel_rows);
    return (rx < 0 || ry < 0) ? -1 : ry * geom.panel_cols + rx;
}

WeightedLightField build_lightfield_target(const std::vector<Plane>& views, const DisplayGeometry& geom,
                                           const ViewGrid& grid) {
    geom.validate();
    if (grid.size() < 1) throw std::invalid_argument("empty view grid");
    if (static_cast<int>(views.size()) != grid.size()) throw std::invalid_argument("one view image per grid direction");
    for (const auto& v : views) check_panel_image(v, geom);

    std::map<RayPair, std::pair<double, int>> acc;  // sum, count
    const auto dirs = grid.angles();
    for (std::size_t v = 0; v < dirs.size(); ++v) {
        const auto vals = flat(views[v]);
        for (int a = 0; a < geom.panel_pixels(); ++a) {
            const int b = rear_pixel_of_ray(geom, a, dirs[v].first, dirs[v].second);
            if (b < 0) continue;
            auto& slot = acc[{a, b}];
            slot.first += vals[a];
            slot.second += 1;
        }
    }
    std::vector<RayPair> pairs;
    Eigen::VectorXd values(static_cast<Eigen::Index>(acc.size()));
    pairs.reserve(acc.size());
    for (const auto& [pair, s] : acc) {
        values[static_cast<Eigen::Index>(pairs.size())] = s.first / s.second;
        pairs.push_back(pair);
    }
    return WeightedLightField::uniform(RaySupport(geom.panel_pixels(), std::move(pairs)), std::move(values));
}

WeightedLightField build_uniform_lightfield_target(const Plane& image, const DisplayGeometry& geom,
                                                   const ViewGrid& grid) {
    if ((image.array() < 0.0).any() || (image.array() > 1.0).any())
        throw std::invalid_argument("image values must lie in [0, 1]");
    return build_lightfield_target(std::vector<Plane>(static_cast<std::size_t>(std::max(grid.size(), 0)), image),
                                   geom, grid);
}

FactorizationResult decompose_3d(const WeightedLightField& target, int rank, const SolverConfig& cfg,
                                 double lower_bound) {
    if ((target.values.array() > 1.0).any()) throw std::invalid_argument("light-field target values must be <= 1");
    SolverConfig fc = cfg;
    fc.fact_iters = cfg.outer_iters;
    return factorize_box(target, rank, lower_bound, fc);
}

HdrResult decompose_hdr(const Plane& image, int rank, double black_level, const DisplayGeometry& geom,
                        const ViewGrid& grid, const SolverConfig& cfg) {
    if (!(black_level >= 0.0 && black_level < 1.0)) throw std::invalid_argument("black level must lie in [0, 1)");
    const DisplayGeometry g = diffuser_off(geom);
    check_panel_image(image, g);
    const WeightedLightField target = build_uniform_lightfield_target(image, g, grid);
    FactorizationResult fr = decompose_3d(target, rank, cfg, black_level);
    HdrResult res{std::move(fr.patterns), std::move(fr.objective), 0};
    res.unreachable_pixels = static_cast<int>((image.array() < black_level * black_level).count());
    return res;
}

Plane simulate_hdr(const PatternSet& pat, const DisplayGeometry& geom) {
    return render_view(pat, diffuser_off(geom), 0.0, 0.0);
}

Plane simulate_single_panel(const Plane& image, double black_level) { return image.cwiseMax(black_level); }

std::vector<double> view_psnr(const PatternSet& pat, const std::vector<Plane>& views, const DisplayGeometry& geom,
                              const ViewGrid& grid) {
    const DisplayGeometry g = diffuser_off(geom);
    const auto dirs = grid.angles();
    if (views.size() != dirs.size()) throw std::invalid_argument("one view image per grid direction");
    std::vector<double> out;
    for (std::size_t v = 0; v < dirs.size(); ++v) {
        const Plane shown = render_view(pat, g, dirs[v].first, dirs[v].second);
        Plane mask(g.panel_rows, g.panel_cols);
        for (int a = 0; a < g.panel_pixels(); ++a)
            flat(mask)[a] = rear_pixel_of_ray(g, a, dirs[v].first, dirs[v].second) >= 0 ? 1.0 : 0.0;
        out.push_back(psnr_masked(shown, views[v], mask));
    }
    return out;
}

std::vector<Plane> two_plane_scene(const DisplayGeometry& geom, const ViewGrid& grid) {
    const DisplayGeometry g = diffuser_off(geom);
    const double p = g.panel_pitch;
    const double z_front = 0.25 * g.gap_panels, z_back = 0.75 * g.gap_panels;
    const double cx = 0.5 * g.panel_cols, cy = 0.5 * g.panel_rows;
    const double radius = 0.3 * std::min(g.panel_cols, g.panel_rows);

    // positions in panel pixels
    auto background = [](double u, double v) {
        return 0.5 + 0.25 * std::sin(2.0 * kPi * u / 7.3) * std::cos(2.0 * kPi * v / 5.1) +
               0.15 * std::sin(2.0 * kPi * (u + v) / 3.7);
    };
    auto foreground = [](double u, double v) { return 0.8 + 0.12 * std::cos(2.0 * kPi * (u - 0.5 * v) / 4.3); };

    constexpr int kSuper = 4;
    std::vector<Plane> views;
    for (const auto& [nx, ny] : grid.angles()) {
        const double tx = std::tan(nx * kDegToRad) / p, ty = std::tan(ny * kDegToRad) / p;
        Plane img(g.panel_rows, g.panel_cols);
        for (int r = 0; r < g.panel_rows; ++r) {
            for (int c = 0; c < g.panel_cols; ++c) {
                double acc = 0.0;
                for (int sy = 0; sy < kSuper; ++sy) {
                    for (int sx = 0; sx < kSuper; ++sx) {
                        const double u = c + (sx + 0.5) / kSuper, v = r + (sy + 0.5) / kSuper;
                        const double uf = u - z_front * tx, vf = v - z_front * ty;
                        if (std::hypot(uf - cx, vf - cy) < radius)
                            acc += foreground(uf, vf);
                        else
                            acc += background(u - z_back * tx, v - z_back * ty);
                    }
                }
                img(r, c) = acc / (kSuper * kSuper);
            }
        }
        views.push_back(std::move(img));
    }
    return views;
}

} // namespace sres
