#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace sres {

/// Row-major single-channel image; element (r, c) is pixel row r, column c.
/// Vectorization everywhere in the library follows this storage order.
template <typename Scalar>
using PlaneT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Plane = PlaneT<double>;

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Flattened, row-major view of a plane.
template <typename Derived>
auto flat(Eigen::PlainObjectBase<Derived>& plane) {
    return Eigen::Map<VectorT<typename Derived::Scalar>>(plane.data(), plane.size());
}
template <typename Derived>
auto flat(const Eigen::PlainObjectBase<Derived>& plane) {
    return Eigen::Map<const VectorT<typename Derived::Scalar>>(plane.data(), plane.size());
}

/// Multi-channel image (1 = gray, 3 = RGB). Channels are processed independently.
struct Image {
    std::vector<Plane> channels;

    Image() = default;
    explicit Image(Plane gray) { channels.push_back(std::move(gray)); }

    int cols() const { return channels.empty() ? 0 : static_cast<int>(channels.front().cols()); }
    int rows() const { return channels.empty() ? 0 : static_cast<int>(channels.front().rows()); }
    int channel_count() const { return static_cast<int>(channels.size()); }
};

/// Physical layout of the dual-layer panel stack and the diffuser. Lengths in mm.
struct DisplayGeometry {
    int panel_cols = 0;
    int panel_rows = 0;
    double panel_pitch = 0.0;   // mm per LCD pixel
    double gap_panels = 0.0;    // front-to-rear panel spacing
    double gap_diffuser = 0.0;  // diffuser-to-front-panel spacing
    double sr_factor = 1.0;     // superresolved pixels per LCD pixel, per axis

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;

    int panel_pixels() const { return panel_cols * panel_rows; }
    int target_cols() const;
    int target_rows() const;
    int target_pixels() const { return target_cols() * target_rows(); }
    double superpixel_pitch() const { return panel_pitch / sr_factor; }

    /// Stable 64-bit fingerprint of the geometry (FNV-1a over a canonical text form).
    std::uint64_t hash() const;
};

enum class DiffuserProfile { Cosine, Uniform };

struct DiffuserModel {
    double half_angle = 7.5;  // degrees
    DiffuserProfile profile = DiffuserProfile::Cosine;
    int angular_samples = 0;  // rays per axis; 0 selects default_angular_samples()

    void validate() const;
};

/// Prototype panel stack: 0.282 mm pitch, 19 mm between panels, diffuser 6 mm in front,
/// cosine diffuser with a 15 degree field of view.
DisplayGeometry prototype_geometry(int panel_cols, int panel_rows, double sr_factor);
DiffuserModel prototype_diffuser();

/// Prototype panels with the diffuser 0.3 mm in front and a 2 degree field of view,
/// the best-conditioned small-distance configuration of this model.
DisplayGeometry simulation_geometry(int panel_cols, int panel_rows, double sr_factor);
DiffuserModel simulation_diffuser();

/// Angular weight of the diffuser at angle theta (degrees) from its axis.
double diffuser_weight(const DiffuserModel& model, double theta);

struct Footprints {
    double front = 0.0;  // s1, mm
    double rear = 0.0;   // s2, mm
};

Footprints diffuser_footprints(const DisplayGeometry& geom, const DiffuserModel& model);

/// 2*ceil(8 s2 / pitch) + 1: every rear pixel inside the footprint is crossed by about 16 rays.
int default_angular_samples(const DisplayGeometry& geom, const DiffuserModel& model);

/// Sample angles (degrees) of the per-axis angular grid, midpoint rule over (-half_angle, half_angle).
std::vector<double> angular_grid(const DiffuserModel& model, int samples);

/// K time-multiplexed front/rear pattern pairs; column k of front/rear is frame k.
struct PatternSet {
    Eigen::MatrixXd front;  // M x K
    Eigen::MatrixXd rear;   // M x K
    double lower_bound = 0.0;

    int rank() const { return static_cast<int>(front.cols()); }
    int panel_pixels() const { return static_cast<int>(front.rows()); }

    /// Throws std::invalid_argument unless shapes agree and lower_bound <= front, rear <= 1.
    void validate(double tol = 0.0) const;
};

enum class FactorUpdate { Multiplicative, Hals };

struct SolverConfig {
    int outer_iters = 200;
    int sart_iters = 10;
    int fact_iters = 3;
    double rho = 1.0;
    double tol_primal = 1e-7;
    std::uint64_t seed = 1;
    double relaxation = 0.5;
    FactorUpdate update = FactorUpdate::Hals;
    /// Projected-gradient steps on the image-space objective after the splitting iterations (0 = off).
    int polish_iters = 300;

    void validate() const;
};

} // namespace sres
