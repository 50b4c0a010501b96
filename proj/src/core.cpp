#include "sres/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sres {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Coarser grids quantize the per-pixel weights enough to dominate conditioning results.
constexpr double kRaysPerRearPixel = 8.0;

int scaled_extent(int panel_count, double factor) {
    const double scaled = panel_count * factor;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, scaled)) {
        throw std::invalid_argument("sr_factor * panel size must be an integer pixel count");
    }
    return static_cast<int>(rounded);
}

} // namespace

void DisplayGeometry::validate() const {
    if (panel_cols < 1 || panel_rows < 1) throw std::invalid_argument("panel resolution must be positive");
    if (!(panel_pitch > 0.0)) throw std::invalid_argument("panel_pitch must be > 0");
    if (!(gap_panels > 0.0)) throw std::invalid_argument("gap_panels must be > 0");
    if (!(gap_diffuser >= 0.0)) throw std::invalid_argument("gap_diffuser must be >= 0");
    if (!(sr_factor >= 1.0) || !std::isfinite(sr_factor)) throw std::invalid_argument("sr_factor must be >= 1");
    scaled_extent(panel_cols, sr_factor);
    scaled_extent(panel_rows, sr_factor);
}

int DisplayGeometry::target_cols() const { return scaled_extent(panel_cols, sr_factor); }
int DisplayGeometry::target_rows() const { return scaled_extent(panel_rows, sr_factor); }

std::uint64_t DisplayGeometry::hash() const {
    std::ostringstream os;
    os.precision(17);
    os << panel_cols << ' ' << panel_rows << ' ' << panel_pitch << ' ' << gap_panels << ' ' << gap_diffuser << ' '
       << sr_factor;
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

void DiffuserModel::validate() const {
    if (!(half_angle > 0.0 && half_angle < 90.0)) throw std::invalid_argument("half_angle must lie in (0, 90) degrees");
    if (angular_samples != 0 && angular_samples < 2) throw std::invalid_argument("angular_samples must be >= 2");
}

DisplayGeometry prototype_geometry(int panel_cols, int panel_rows, double sr_factor) {
    DisplayGeometry g;
    g.panel_cols = panel_cols;
    g.panel_rows = panel_rows;
    g.panel_pitch = 0.282;  // 22" 1680x1050 panel
    g.gap_panels = 19.0;
    g.gap_diffuser = 6.0;
    g.sr_factor = sr_factor;
    return g;
}

DiffuserModel prototype_diffuser() {
    DiffuserModel m;
    m.half_angle = 7.5;
    m.profile = DiffuserProfile::Cosine;
    return m;
}

DisplayGeometry simulation_geometry(int panel_cols, int panel_rows, double sr_factor) {
    DisplayGeometry g = prototype_geometry(panel_cols, panel_rows, sr_factor);
    g.gap_diffuser = 0.3;
    return g;
}

DiffuserModel simulation_diffuser() {
    DiffuserModel m;
    m.half_angle = 1.0;
    m.profile = DiffuserProfile::Cosine;
    return m;
}

double diffuser_weight(const DiffuserModel& model, double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("diffuser_weight: theta must be finite");
    const double t = std::abs(theta);
    if (t >= model.half_angle) return 0.0;
    switch (model.profile) {
    case DiffuserProfile::Cosine:
        return std::cos(0.5 * std::numbers::pi * t / model.half_angle);
    case DiffuserProfile::Uniform:
        return 1.0;
    }
    return 0.0;
}

Footprints diffuser_footprints(const DisplayGeometry& geom, const DiffuserModel& model) {
    const double t = std::tan(model.half_angle * kDegToRad);
    return {2.0 * geom.gap_diffuser * t, 2.0 * (geom.gap_diffuser + geom.gap_panels) * t};
}

int default_angular_samples(const DisplayGeometry& geom, const DiffuserModel& model) {
    const Footprints fp = diffuser_footprints(geom, model);
    return 2 * static_cast<int>(std::ceil(kRaysPerRearPixel * fp.rear / geom.panel_pitch)) + 1;
}

std::vector<double> angular_grid(const DiffuserModel& model, int samples) {
    std::vector<double> grid(static_cast<std::size_t>(samples));
    const double step = 2.0 * model.half_angle / samples;
    for (int j = 0; j < samples; ++j) grid[static_cast<std::size_t>(j)] = -model.half_angle + (j + 0.5) * step;
    return grid;
}

void PatternSet::validate(double tol) const {
    if (front.rows() != rear.rows() || front.cols() != rear.cols())
        throw std::invalid_argument("front and rear pattern shapes differ");
    if (front.cols() < 1) throw std::invalid_argument("pattern set needs at least one frame");
    if (!(lower_bound >= 0.0 && lower_bound < 1.0)) throw std::invalid_argument("lower_bound must lie in [0, 1)");
    auto within = [&](const Eigen::MatrixXd& m) {
        return m.allFinite() && (m.array() >= lower_bound - tol).all() && (m.array() <= 1.0 + tol).all();
    };
    if (!within(front) || !within(rear)) throw std::invalid_argument("pattern values outside [lower_bound, 1]");
}

void SolverConfig::validate() const {
    if (outer_iters < 1 || sart_iters < 1 || fact_iters < 1)
        throw std::invalid_argument("iteration counts must be >= 1");
    if (polish_iters < 0) throw std::invalid_argument("polish_iters must be >= 0");
    if (!(tol_primal > 0.0)) throw std::invalid_argument("tol_primal must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
    if (!(relaxation > 0.0 && relaxation <= 2.0)) throw std::invalid_argument("relaxation must lie in (0, 2]");
}

} // namespace sres
