#pragma once

#include "sres/core.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sres {

enum class SweepKind { Conditioning, DistancePsnr, RankPsnr, FactorPsnr };

SweepKind parse_sweep_kind(const std::string& name);
std::string sweep_kind_name(SweepKind kind);

struct SweepResult {
    SweepKind kind = SweepKind::Conditioning;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void write_csv(std::ostream& os) const;
};

/// Supplies the test image at a requested (cols, rows).
using ImageSource = std::function<Plane(int cols, int rows)>;

/// Area-resamples a fixed image to whatever size is requested.
ImageSource resampling_source(Plane image);

struct SweepSpec {
    SweepKind kind = SweepKind::Conditioning;
    /// Diffuser distances (mm), ranks or sr factors, depending on kind.
    std::vector<double> values;
    /// Conditioning only: diffuser spreads as full field of view, degrees.
    std::vector<double> spreads;
    DisplayGeometry geometry;
    DiffuserModel diffuser;
    int rank = 4;
    int tile = 16;  // conditioning tile, superpixels
};

/// Runs build -> decompose -> simulate -> metric at every grid point.
///   conditioning:  distance, spread, condition
///   distance_psnr: distance, psnr, native_psnr
///   rank_psnr:     rank, psnr
///   factor_psnr:   factor, psnr, native_psnr, wobulation_psnr, cubic_psnr
/// Failures are rethrown with the grid point in the message.
SweepResult sweep(const SweepSpec& spec, const ImageSource& image, const SolverConfig& cfg);

/// Box area resampling to an arbitrary size.
Plane resample_area(const Plane& image, int cols, int rows);

} // namespace sres
