#include "sres/mtf.hpp"

#include "sres/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace sres {
namespace {

constexpr double kPi = std::numbers::pi;

struct EdgeLine {
    double offset = 0.0;  // x at y = 0
    double slope = 0.0;   // dx / dy
};

EdgeLine fit_edge(const Plane& img) {
    const int rows = static_cast<int>(img.rows()), cols = static_cast<int>(img.cols());
    const Plane diff = img.rightCols(cols - 1) - img.leftCols(cols - 1);
    const double energy = diff.cwiseAbs().sum();
    if (!(energy > 1e-3 * rows)) throw AnalysisError("no edge found: derivative energy too low");
    const double polarity = diff.sum() >= 0.0 ? 1.0 : -1.0;
    const int half = std::max(3, cols / 10);

    std::vector<double> ys, xs;
    for (int r = 0; r < rows; ++r) {
        Eigen::Index peak = 0;
        (polarity * diff.row(r)).maxCoeff(&peak);
        double sw = 0.0, sx = 0.0;
        for (int c = std::max(0, static_cast<int>(peak) - half); c <= std::min(cols - 2, static_cast<int>(peak) + half); ++c) {
            const double w = std::max(polarity * diff(r, c), 0.0);
            sw += w;
            sx += w * (c + 1.0);  // boundary between pixel centres c + 0.5 and c + 1.5
        }
        if (sw > 0.0) {
            ys.push_back(r + 0.5);
            xs.push_back(sx / sw);
        }
    }
    if (ys.size() < 3) throw AnalysisError("no edge found: too few rows with a transition");

    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const double my = y.mean(), mx = x.mean();
    const double syy = (y.array() - my).square().sum();
    const double slope = syy > 0.0 ? ((y.array() - my) * (x.array() - mx)).sum() / syy : 0.0;
    return {mx - slope * my, slope};
}

} // namespace

double MtfCurve::at(double f) const {
    if (frequencies.empty()) return 0.0;
    if (f <= frequencies.front()) return magnitudes.front();
    if (f >= frequencies.back()) return magnitudes.back();
    const auto it = std::upper_bound(frequencies.begin(), frequencies.end(), f);
    const auto i = static_cast<std::size_t>(it - frequencies.begin());
    const double t = (f - frequencies[i - 1]) / (frequencies[i] - frequencies[i - 1]);
    return (1.0 - t) * magnitudes[i - 1] + t * magnitudes[i];
}

void MtfCurve::write_csv(std::ostream& os) const {
    os << "frequency,mtf\n";
    os.precision(10);
    for (std::size_t i = 0; i < frequencies.size(); ++i) os << frequencies[i] << ',' << magnitudes[i] << '\n';
}

MtfCurve mtf_slanted_edge(const Plane& image, double edge_angle_hint, int oversampling, double pixels_per_panel_pixel) {
    if (oversampling < 1) throw std::invalid_argument("oversampling must be >= 1");
    if (!(pixels_per_panel_pixel > 0.0)) throw std::invalid_argument("pixels_per_panel_pixel must be > 0");
    if (image.rows() < 4 || image.cols() < 8) throw AnalysisError("edge image too small");
    if (!image.allFinite()) throw std::invalid_argument("edge image has non-finite values");

    const int rows = static_cast<int>(image.rows()), cols = static_cast<int>(image.cols());
    const EdgeLine edge = fit_edge(image);
    const double phi = std::atan(edge.slope);
    const double cphi = std::cos(phi);

    MtfCurve out;
    out.oversampling = oversampling;
    out.edge_angle = phi * 180.0 / kPi;
    const double slant = std::abs(out.edge_angle);
    out.slant_warning = slant < 2.0 || slant > 10.0 || std::abs(out.edge_angle - edge_angle_hint) > 2.0;

    // distance from the edge to the nearest left/right border, along the normal
    const double x_top = edge.offset, x_bottom = edge.offset + edge.slope * rows;
    const double reach = std::min(std::min(x_top, x_bottom), cols - std::max(x_top, x_bottom)) * cphi;
    const int half = static_cast<int>(std::floor(reach)) - 1;
    if (half < 2) throw AnalysisError("edge too close to the image border");

    const int n = 2 * half * oversampling;
    std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (int r = 0; r < rows; ++r) {
        const double xe = edge.offset + edge.slope * (r + 0.5);
        for (int c = 0; c < cols; ++c) {
            const double dist = (c + 0.5 - xe) * cphi;
            const int bin = static_cast<int>(std::floor((dist + half) * oversampling));
            if (bin < 0 || bin >= n) continue;
            sum[static_cast<std::size_t>(bin)] += image(r, c);
            ++count[static_cast<std::size_t>(bin)];
        }
    }
    std::vector<double> esf(static_cast<std::size_t>(n), 0.0);
    std::vector<int> filled;
    for (int i = 0; i < n; ++i) {
        if (count[static_cast<std::size_t>(i)] > 0) {
            esf[static_cast<std::size_t>(i)] = sum[static_cast<std::size_t>(i)] / count[static_cast<std::size_t>(i)];
            filled.push_back(i);
        }
    }
    if (filled.size() < 4) throw AnalysisError("too few samples near the edge");
    // empty bins: linear interpolation between filled neighbours, constant beyond the ends
    for (int i = 0, k = 0; i < n; ++i) {
        while (k + 1 < static_cast<int>(filled.size()) && filled[static_cast<std::size_t>(k) + 1] <= i) ++k;
        const int lo = filled[static_cast<std::size_t>(k)];
        if (lo == i) continue;
        if (i < lo || k + 1 == static_cast<int>(filled.size())) {
            esf[static_cast<std::size_t>(i)] = esf[static_cast<std::size_t>(lo)];
            continue;
        }
        const int hi = filled[static_cast<std::size_t>(k) + 1];
        const double t = static_cast<double>(i - lo) / (hi - lo);
        esf[static_cast<std::size_t>(i)] = (1.0 - t) * esf[static_cast<std::size_t>(lo)] + t * esf[static_cast<std::size_t>(hi)];
    }

    Eigen::VectorXd lsf(n);
    for (int i = 1; i + 1 < n; ++i) lsf[i] = 0.5 * (esf[static_cast<std::size_t>(i) + 1] - esf[static_cast<std::size_t>(i) - 1]);
    lsf[0] = lsf[1];
    lsf[n - 1] = lsf[n - 2];

    const double mass = lsf.cwiseAbs().sum();
    if (!(mass > 0.0)) throw AnalysisError("flat edge spread function");
    double centre = 0.0;
    for (int i = 0; i < n; ++i) centre += i * std::abs(lsf[i]);
    centre /= mass;
    for (int i = 0; i < n; ++i) lsf[i] *= 0.54 + 0.46 * std::cos(2.0 * kPi * (i - centre) / n);

    const double step = 1.0 / oversampling;  // bin width, pixels
    const double to_norm = 2.0 * pixels_per_panel_pixel;
    std::vector<double> mag;
    for (int k = 0; k <= n / 2; ++k) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < n; ++i) acc += lsf[i] * std::polar(1.0, -2.0 * kPi * k * i / n);
        const double f = k / (n * step);
        const double arg = 2.0 * kPi * f * step;
        const double corr = k == 0 ? 1.0 : std::max(std::sin(arg) / arg, 0.1);
        mag.push_back(std::abs(acc) / corr);
        out.frequencies.push_back(f * to_norm);
    }
    const double dc = mag.front();
    if (!(dc > 0.0)) throw AnalysisError("edge has no net contrast");
    for (double m : mag) out.magnitudes.push_back(m / dc);
    out.esf = std::move(esf);
    return out;
}

} // namespace sres
