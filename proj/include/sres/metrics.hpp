#pragma once

#include "sres/core.hpp"

namespace sres {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrCap = 99.0;

double mse(const Plane& a, const Plane& b);

/// 10 log10(1 / MSE) for images with peak value 1, capped at kPsnrCap.
double psnr(const Plane& a, const Plane& b);

/// PSNR over pixels where mask is nonzero.
double psnr_masked(const Plane& a, const Plane& b, const Plane& mask);

} // namespace sres
