#include "sres/image_io.hpp"

#include "sres/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

namespace sres {
namespace {

// Next header token, skipping whitespace and comments.
long header_value(std::istream& is, const std::string& name) {
    for (;;) {
        const int c = is.peek();
        if (c == '#') {
            std::string skip;
            std::getline(is, skip);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            is.get();
        } else {
            break;
        }
    }
    long v = -1;
    if (!(is >> v) || v < 0) throw IoError(name + ": malformed PNM header");
    return v;
}

} // namespace

Image read_pnm(std::istream& is, const std::string& name) {
    char magic[2] = {};
    if (!is.read(magic, 2) || magic[0] != 'P') throw IoError(name + ": not a PNM file");
    int channels = 0;
    bool binary = false;
    switch (magic[1]) {
    case '2': channels = 1; break;
    case '3': channels = 3; break;
    case '5': channels = 1; binary = true; break;
    case '6': channels = 3; binary = true; break;
    default: throw IoError(name + ": unsupported PNM variant P" + std::string(1, magic[1]));
    }
    const long cols = header_value(is, name), rows = header_value(is, name), maxval = header_value(is, name);
    if (cols < 1 || rows < 1 || cols > (1 << 16) || rows > (1 << 16)) throw IoError(name + ": bad image size");
    if (maxval < 1 || maxval > 65535) throw IoError(name + ": bad maxval");
    if (binary) is.get();  // single whitespace after maxval

    Image img;
    img.channels.assign(static_cast<std::size_t>(channels), Plane(rows, cols));
    const bool wide = maxval > 255;
    const double scale = 1.0 / static_cast<double>(maxval);
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                long v = 0;
                if (binary) {
                    unsigned char b[2] = {};
                    if (!is.read(reinterpret_cast<char*>(b), wide ? 2 : 1)) throw IoError(name + ": truncated pixel data");
                    v = wide ? (b[0] << 8 | b[1]) : b[0];
                } else if (!(is >> v)) {
                    throw IoError(name + ": truncated pixel data");
                }
                if (v > maxval) throw IoError(name + ": sample exceeds maxval");
                img.channels[static_cast<std::size_t>(ch)](r, c) = v * scale;
            }
        }
    }
    return img;
}

Image read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image '" + path + "'");
    return read_pnm(in, path);
}

void write_pnm(std::ostream& os, const Image& image) {
    const int channels = image.channel_count();
    if (channels != 1 && channels != 3) throw std::invalid_argument("images must have 1 or 3 channels");
    const int cols = image.cols(), rows = image.rows();
    os << (channels == 1 ? "P5" : "P6") << '\n' << cols << ' ' << rows << "\n65535\n";
    std::vector<unsigned char> buf;
    buf.reserve(static_cast<std::size_t>(cols) * rows * channels * 2);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                double v = image.channels[static_cast<std::size_t>(ch)](r, c);
                v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
                const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
                buf.push_back(static_cast<unsigned char>(q >> 8));
                buf.push_back(static_cast<unsigned char>(q & 0xff));
            }
        }
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw IoError("failed to write image data");
}

void write_image(const std::string& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create image '" + path + "'");
    try {
        write_pnm(out, image);
    } catch (const IoError&) {
        throw IoError("failed to write image '" + path + "'");
    }
}

void write_image(const std::string& path, const Plane& gray) { write_image(path, Image(gray)); }

Plane to_gray(const Image& image) {
    if (image.channel_count() == 1) return image.channels.front();
    if (image.channel_count() != 3) throw std::invalid_argument("images must have 1 or 3 channels");
    return 0.299 * image.channels[0] + 0.587 * image.channels[1] + 0.114 * image.channels[2];
}

} // namespace sres
