#pragma once

// Brute-force reference implementations used by the tests.

#include "sres/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace oracle {

inline double profile(const sres::DiffuserModel& m, double theta_deg) {
    if (std::abs(theta_deg) >= m.half_angle) return 0.0;
    if (m.profile == sres::DiffuserProfile::Uniform) return 1.0;
    return std::cos(std::numbers::pi / 2.0 * theta_deg / m.half_angle);
}

/// Dense N x M^2 projection matrix traced ray by ray over the full 2D angular grid,
/// column a * M + b for front pixel a and rear pixel b.
inline Eigen::MatrixXd dense_projection(const sres::DisplayGeometry& g, const sres::DiffuserModel& m) {
    const int M = g.panel_pixels();
    const int tc = g.target_cols(), tr = g.target_rows();
    const int samples = m.angular_samples;
    const double sub = g.panel_pitch / g.sr_factor;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tc) * tr, static_cast<Eigen::Index>(M) * M);
    auto cell = [&](double pos, int count) {
        const double c = std::floor(pos / g.panel_pitch);
        return (c < 0 || c >= count) ? -1 : static_cast<int>(c);
    };
    for (int iy = 0; iy < tr; ++iy) {
        for (int ix = 0; ix < tc; ++ix) {
            const double x = (ix + 0.5) * sub, y = (iy + 0.5) * sub;
            const int row = iy * tc + ix;
            for (int jy = 0; jy < samples; ++jy) {
                const double ty = -m.half_angle + (jy + 0.5) * 2.0 * m.half_angle / samples;
                for (int jx = 0; jx < samples; ++jx) {
                    const double tx = -m.half_angle + (jx + 0.5) * 2.0 * m.half_angle / samples;
                    const double w = profile(m, tx) * profile(m, ty);
                    if (w <= 0.0) continue;
                    const double ttx = std::tan(tx * std::numbers::pi / 180.0), tty = std::tan(ty * std::numbers::pi / 180.0);
                    const int fx = cell(x - g.gap_diffuser * ttx, g.panel_cols);
                    const int fy = cell(y - g.gap_diffuser * tty, g.panel_rows);
                    const int rx = cell(x - (g.gap_diffuser + g.gap_panels) * ttx, g.panel_cols);
                    const int ry = cell(y - (g.gap_diffuser + g.gap_panels) * tty, g.panel_rows);
                    if (fx < 0 || fy < 0 || rx < 0 || ry < 0) continue;
                    D(row, static_cast<Eigen::Index>(fy * g.panel_cols + fx) * M + (ry * g.panel_cols + rx)) += w;
                }
            }
            const double s = D.row(row).sum();
            if (s > 0.0) D.row(row) /= s;
        }
    }
    return D;
}

/// vec((1/K) F G^T), index a * M + b.
inline Eigen::VectorXd vec_lightfield(const sres::PatternSet& p) {
    const Eigen::MatrixXd L = p.front * p.rear.transpose() / p.rank();
    Eigen::VectorXd v(L.size());
    for (Eigen::Index a = 0; a < L.rows(); ++a)
        for (Eigen::Index b = 0; b < L.cols(); ++b) v[a * L.cols() + b] = L(a, b);
    return v;
}

} // namespace oracle
