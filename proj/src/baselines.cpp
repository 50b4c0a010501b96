#include "sres/baselines.hpp"

#include "sres/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sres {
namespace {

double keys(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

// Interpolation matrix (target_count x panel_count) for one axis.
Eigen::MatrixXd cubic_axis(int panel_count, int target_count, double factor) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(target_count, panel_count);
    for (int i = 0; i < target_count; ++i) {
        const double u = (i + 0.5) / factor - 0.5;
        const int base = static_cast<int>(std::floor(u));
        for (int j = base - 1; j <= base + 2; ++j) {
            const int src = std::clamp(j, 0, panel_count - 1);
            m(i, src) += keys(u - j);
        }
    }
    return m;
}

int integer_factor(const DisplayGeometry& geom) {
    const int s = static_cast<int>(std::lround(geom.sr_factor));
    if (std::abs(geom.sr_factor - s) > 1e-12) throw std::invalid_argument("wobulation needs an integer sr_factor");
    return s;
}

// Panel index feeding target coordinate t for a subframe shifted by `shift` superpixels.
int source_index(int t, int shift, int s, int count) { return std::clamp(static_cast<int>(std::floor(static_cast<double>(t - shift) / s)), 0, count - 1); }

} // namespace

Plane baseline_cubic(const Plane& target, const DisplayGeometry& geom) {
    const Plane low = box_downsample(target, geom);
    const Eigen::MatrixXd ux = cubic_axis(geom.panel_cols, geom.target_cols(), geom.sr_factor);
    const Eigen::MatrixXd uy = cubic_axis(geom.panel_rows, geom.target_rows(), geom.sr_factor);
    return uy * low * ux.transpose();
}

std::vector<std::pair<int, int>> wobulation_shifts(int frames, int sr_factor) {
    if (frames < 1) throw std::invalid_argument("wobulation needs at least one frame");
    if (sr_factor < 1 || frames > sr_factor * sr_factor)
        throw std::invalid_argument("wobulation frame count exceeds the number of subpixel phases");
    const int s = sr_factor;
    std::vector<std::pair<int, int>> chosen{{0, 0}};
    auto torus = [s](int a, int b) {
        const int d = std::abs(a - b) % s;
        return std::min(d, s - d);
    };
    while (static_cast<int>(chosen.size()) < frames) {
        int best = -1, best_d = -1;
        for (int p = 0; p < s * s; ++p) {
            const int px = p % s, py = p / s;
            int dmin = std::numeric_limits<int>::max();
            for (const auto& [cx, cy] : chosen) {
                const int dx = torus(px, cx), dy = torus(py, cy);
                dmin = std::min(dmin, dx * dx + dy * dy);
            }
            if (dmin > best_d) {
                best_d = dmin;
                best = p;
            }
        }
        chosen.emplace_back(best % s, best / s);
    }
    return chosen;
}

Plane wobulation_render(const std::vector<Plane>& subframes, const std::vector<std::pair<int, int>>& shifts,
                        const DisplayGeometry& geom) {
    if (subframes.empty() || subframes.size() != shifts.size())
        throw std::invalid_argument("one shift per wobulation subframe");
    const int s = integer_factor(geom);
    const int tc = geom.target_cols(), tr = geom.target_rows();
    Plane out = Plane::Zero(tr, tc);
    for (std::size_t k = 0; k < subframes.size(); ++k) {
        const Plane& f = subframes[k];
        if (f.cols() != geom.panel_cols || f.rows() != geom.panel_rows)
            throw std::invalid_argument("wobulation subframe size does not match the panel");
        for (int y = 0; y < tr; ++y) {
            const int sy = source_index(y, shifts[k].second, s, geom.panel_rows);
            for (int x = 0; x < tc; ++x) out(y, x) += f(sy, source_index(x, shifts[k].first, s, geom.panel_cols));
        }
    }
    return out / static_cast<double>(subframes.size());
}

WobulationResult baseline_wobulation(const Plane& target, int frames, const DisplayGeometry& geom, int iterations) {
    geom.validate();
    if (target.cols() != geom.target_cols() || target.rows() != geom.target_rows())
        throw std::invalid_argument("wobulation target size does not match geometry");
    const int s = integer_factor(geom);
    WobulationResult res;
    res.shifts = wobulation_shifts(frames, s);

    // column sums of the averaging operator, per subframe pixel
    std::vector<Plane> cover(static_cast<std::size_t>(frames), Plane::Zero(geom.panel_rows, geom.panel_cols));
    for (int k = 0; k < frames; ++k) {
        for (int y = 0; y < geom.target_rows(); ++y) {
            const int sy = source_index(y, res.shifts[static_cast<std::size_t>(k)].second, s, geom.panel_rows);
            for (int x = 0; x < geom.target_cols(); ++x)
                cover[static_cast<std::size_t>(k)](sy, source_index(x, res.shifts[static_cast<std::size_t>(k)].first, s, geom.panel_cols)) += 1.0 / frames;
        }
    }

    const Plane start = box_downsample(target, geom).cwiseMax(0.0).cwiseMin(1.0);
    res.subframes.assign(static_cast<std::size_t>(frames), start);
    for (int it = 0; it < iterations; ++it) {
        // every target row of the operator sums to 1, so the SART row weights are 1
        const Plane residual = target - wobulation_render(res.subframes, res.shifts, geom);
        for (int k = 0; k < frames; ++k) {
            Plane grad = Plane::Zero(geom.panel_rows, geom.panel_cols);
            const auto [dx, dy] = res.shifts[static_cast<std::size_t>(k)];
            for (int y = 0; y < geom.target_rows(); ++y) {
                const int sy = source_index(y, dy, s, geom.panel_rows);
                for (int x = 0; x < geom.target_cols(); ++x) grad(sy, source_index(x, dx, s, geom.panel_cols)) += residual(y, x) / frames;
            }
            Plane& f = res.subframes[static_cast<std::size_t>(k)];
            const Plane& c = cover[static_cast<std::size_t>(k)];
            f = (f.array() + grad.array() / c.array().max(1e-12)).max(0.0).min(1.0).matrix();
        }
    }
    res.perceived = wobulation_render(res.subframes, res.shifts, geom);
    return res;
}

} // namespace sres
