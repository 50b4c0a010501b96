#include "sres/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sres {
namespace {

double to_psnr(double err) {
    if (err <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, -10.0 * std::log10(err));
}

void check_same(const Plane& a, const Plane& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("image dimensions differ");
    if (a.size() == 0) throw std::invalid_argument("empty image");
}

} // namespace

double mse(const Plane& a, const Plane& b) {
    check_same(a, b);
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double psnr(const Plane& a, const Plane& b) { return to_psnr(mse(a, b)); }

double psnr_masked(const Plane& a, const Plane& b, const Plane& mask) {
    check_same(a, b);
    check_same(a, mask);
    const auto on = (mask.array() != 0.0).cast<double>();
    const double count = on.sum();
    if (count == 0.0) throw std::invalid_argument("empty mask");
    return to_psnr(((a - b).array().square() * on).sum() / count);
}

} // namespace sres
