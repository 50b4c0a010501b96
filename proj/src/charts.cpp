#include "sres/charts.hpp"

#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace sres::charts {
namespace {

constexpr double kPi = std::numbers::pi;

void rescale(Plane& p, double lo, double hi) {
    const double mn = p.minCoeff(), mx = p.maxCoeff();
    if (mx - mn <= 0.0) {
        p.setConstant(0.5 * (lo + hi));
        return;
    }
    p = ((p.array() - mn) * ((hi - lo) / (mx - mn)) + lo).matrix();
}

void check_size(int cols, int rows) {
    if (cols < 1 || rows < 1) throw std::invalid_argument("chart size must be positive");
}

// Real part of an inverse DFT with random phases and amplitude |f|^-exponent.
Plane spectral_noise(int cols, int rows, double exponent, double f_min, detail::Rng& rng) {
    Eigen::MatrixXcd coef = Eigen::MatrixXcd::Zero(rows, cols);
    for (int ky = 0; ky < rows; ++ky) {
        for (int kx = 0; kx < cols; ++kx) {
            const double fy = (ky <= rows / 2 ? ky : ky - rows) / static_cast<double>(rows);
            const double fx = (kx <= cols / 2 ? kx : kx - cols) / static_cast<double>(cols);
            const double f = std::hypot(fx, fy);
            const double phase = rng.uniform(0.0, 2.0 * kPi);
            if (f < f_min) continue;
            coef(ky, kx) = std::polar(std::pow(f, -exponent), phase);
        }
    }
    Eigen::MatrixXcd ey(rows, rows), ex(cols, cols);
    for (int y = 0; y < rows; ++y)
        for (int k = 0; k < rows; ++k) ey(y, k) = std::polar(1.0, 2.0 * kPi * k * y / rows);
    for (int x = 0; x < cols; ++x)
        for (int k = 0; k < cols; ++k) ex(x, k) = std::polar(1.0, 2.0 * kPi * k * x / cols);
    const Eigen::MatrixXcd img = ey * coef * ex.transpose();
    return img.real();
}

} // namespace

Plane slanted_edge(int cols, int rows, double angle, double dark, double bright, double blur_sigma) {
    check_size(cols, rows);
    const double t = std::tan(angle * kPi / 180.0);
    const double cx = 0.5 * cols, cy = 0.5 * rows;
    const double cs = std::cos(angle * kPi / 180.0);
    Plane out(rows, cols);
    constexpr int kSuper = 16;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double v = 0.0;
            if (blur_sigma > 0.0) {
                // signed distance from the pixel centre to the edge line x = cx + t (y - cy)
                const double dist = ((c + 0.5) - (cx + t * ((r + 0.5) - cy))) * cs;
                v = 0.5 * std::erfc(-dist / (blur_sigma * std::numbers::sqrt2));
            } else {
                int inside = 0;
                for (int sy = 0; sy < kSuper; ++sy) {
                    const double y = r + (sy + 0.5) / kSuper;
                    for (int sx = 0; sx < kSuper; ++sx) {
                        const double x = c + (sx + 0.5) / kSuper;
                        if (x > cx + t * (y - cy)) ++inside;
                    }
                }
                v = static_cast<double>(inside) / (kSuper * kSuper);
            }
            out(r, c) = dark + (bright - dark) * v;
        }
    }
    return out;
}

Plane chirp(int cols, int rows, double sr_factor, double max_cycles) {
    check_size(cols, rows);
    // frequency in cycles per target pixel rises linearly from 0 to max_cycles / sr_factor
    const double f1 = max_cycles / sr_factor;
    Plane out(rows, cols);
    for (int c = 0; c < cols; ++c) {
        const double x = c + 0.5;
        const double phase = 2.0 * kPi * (0.5 * f1 * x * x / cols);
        out.col(c).setConstant(0.5 + 0.5 * std::cos(phase));
    }
    return out;
}

Plane checkerboard(int cols, int rows, int cell) {
    check_size(cols, rows);
    if (cell < 1) throw std::invalid_argument("checkerboard cell must be >= 1");
    Plane out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = ((r / cell + c / cell) % 2 == 0) ? 1.0 : 0.0;
    return out;
}

Plane pink_noise(int cols, int rows, std::uint64_t seed) {
    check_size(cols, rows);
    detail::Rng rng(seed);
    Plane p = spectral_noise(cols, rows, 1.0, 1e-9, rng);
    rescale(p, 0.05, 0.95);
    return p;
}

Plane shapes_scene(int cols, int rows, std::uint64_t seed) {
    check_size(cols, rows);
    detail::Rng rng(seed);
    const double w = cols, h = rows;
    Plane out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out(r, c) = 0.25 + 0.35 * (c + 0.5) / w + 0.15 * (r + 0.5) / h;
    Plane fine = spectral_noise(cols, rows, 0.5, 0.05, rng);
    rescale(fine, -0.05, 0.05);
    out += fine;

    constexpr int kSuper = 4;
    auto paint = [&](auto&& inside, double value) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                int hits = 0;
                for (int sy = 0; sy < kSuper; ++sy)
                    for (int sx = 0; sx < kSuper; ++sx)
                        hits += inside((c + (sx + 0.5) / kSuper) / w, (r + (sy + 0.5) / kSuper) / h) ? 1 : 0;
                const double a = static_cast<double>(hits) / (kSuper * kSuper);
                out(r, c) = (1.0 - a) * out(r, c) + a * value;
            }
        }
    };
    for (int i = 0; i < 6; ++i) {
        const double x0 = rng.uniform(0.1, 0.9), y0 = rng.uniform(0.1, 0.9), rad = rng.uniform(0.04, 0.15);
        const double v = rng.uniform(0.0, 1.0);
        paint([=](double x, double y) { return (x - x0) * (x - x0) + (y - y0) * (y - y0) < rad * rad; }, v);
    }
    for (int i = 0; i < 5; ++i) {
        const double x0 = rng.uniform(0.0, 0.8), y0 = rng.uniform(0.0, 0.8);
        const double bw = rng.uniform(0.05, 0.25), bh = rng.uniform(0.05, 0.25);
        const double v = rng.uniform(0.0, 1.0);
        paint([=](double x, double y) { return x >= x0 && x < x0 + bw && y >= y0 && y < y0 + bh; }, v);
    }
    // thin strokes, about one pixel wide
    for (int i = 0; i < 10; ++i) {
        const double x0 = rng.uniform(0.05, 0.95), y0 = rng.uniform(0.05, 0.95);
        const double ang = rng.uniform(0.0, kPi), len = rng.uniform(0.1, 0.4);
        const double half = rng.uniform(0.4, 1.0) / w;
        const double v = rng.uniform(0.0, 1.0) < 0.5 ? 0.02 : 0.98;
        const double dx = std::cos(ang), dy = std::sin(ang);
        paint(
            [=](double x, double y) {
                const double along = (x - x0) * dx + (y - y0) * dy;
                const double across = -(x - x0) * dy + (y - y0) * dx;
                return along >= 0.0 && along <= len && std::abs(across) <= half;
            },
            v);
    }
    return out.cwiseMax(0.0).cwiseMin(1.0);
}

Plane texture_scene(int cols, int rows, std::uint64_t seed) {
    check_size(cols, rows);
    detail::Rng rng(seed);
    Plane env = spectral_noise(cols, rows, 2.0, 1e-9, rng);
    rescale(env, 0.2, 1.0);
    Plane out = Plane::Zero(rows, cols);
    for (int g = 0; g < 5; ++g) {
        const double ang = rng.uniform(0.0, kPi);
        const double f = rng.uniform(0.05, 0.35);  // cycles per pixel
        const double ph = rng.uniform(0.0, 2.0 * kPi);
        const double amp = rng.uniform(0.5, 1.0);
        const double ux = std::cos(ang) * f, uy = std::sin(ang) * f;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) out(r, c) += amp * std::cos(2.0 * kPi * (ux * c + uy * r) + ph);
    }
    rescale(out, 0.0, 1.0);
    out = out.cwiseProduct(env);
    rescale(out, 0.05, 0.95);
    return out;
}

int natural_image_count() { return 3; }

std::string natural_image_name(int index) {
    switch (index) {
    case 0: return "pink_noise";
    case 1: return "shapes";
    case 2: return "texture";
    default: throw std::out_of_range("natural image index");
    }
}

Plane natural_image(int index, int cols, int rows) {
    switch (index) {
    case 0: return pink_noise(cols, rows, 11);
    case 1: return shapes_scene(cols, rows, 23);
    case 2: return texture_scene(cols, rows, 37);
    default: throw std::out_of_range("natural image index");
    }
}

Plane hdr_test_image(int cols, int rows) {
    check_size(cols, rows);
    Plane out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (r < rows / 2) {
                out(r, c) = (c + 0.5) / cols;
            } else {
                out(r, c) = c < cols / 2 ? 0.0 : 1.0;
            }
        }
    }
    return out;
}

} // namespace sres::charts
