#pragma once

#include <cstdint>
#include <random>

namespace sres::detail {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// conversions to double are done by hand to stay bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

} // namespace sres::detail
