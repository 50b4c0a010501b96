#pragma once

#include "sres/core.hpp"

#include <iosfwd>
#include <vector>

namespace sres {

struct MtfCurve {
    /// Normalized so the native panel Nyquist frequency is 1.
    std::vector<double> frequencies;
    std::vector<double> magnitudes;
    int oversampling = 4;
    double edge_angle = 0.0;     // measured slant, degrees
    bool slant_warning = false;  // slant outside [2, 10] degrees
    std::vector<double> esf;     // oversampled edge spread function

    /// Linear interpolation of the magnitude at normalized frequency f.
    double at(double f) const;
    void write_csv(std::ostream& os) const;
};

/// Slanted-edge MTF of a near-vertical edge. Per-row derivative centroids give the
/// edge line; pixels are projected onto its normal and binned at 1/oversampling pixel;
/// the ESF is differentiated, Hamming-windowed and Fourier transformed.
/// `pixels_per_panel_pixel` sets the frequency normalization (the sr_factor for
/// superresolved images). Throws AnalysisError when no edge is found.
MtfCurve mtf_slanted_edge(const Plane& image, double edge_angle_hint, int oversampling,
                          double pixels_per_panel_pixel = 1.0);

} // namespace sres
