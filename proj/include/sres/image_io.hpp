#pragma once

#include "sres/core.hpp"

#include <iosfwd>
#include <string>

namespace sres {

/// Reads PGM/PPM (P2, P3, P5, P6) with any maxval up to 65535, scaled to [0, 1].
Image read_pnm(std::istream& is, const std::string& name = "<stream>");
Image read_image(const std::string& path);

/// Writes binary 16-bit PGM (1 channel) or PPM (3 channels). Values are clamped to [0, 1]
/// and quantized once, so reading and rewriting a file reproduces it byte for byte.
void write_pnm(std::ostream& os, const Image& image);
void write_image(const std::string& path, const Image& image);
void write_image(const std::string& path, const Plane& gray);

/// Rec. 601 luma for colour images, the single channel otherwise.
Plane to_gray(const Image& image);

} // namespace sres
