#include <doctest.h>

#include "sres/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace sres;
using doctest::Approx;

namespace {

DiffuserModel cosine(double half) {
    DiffuserModel m;
    m.half_angle = half;
    m.profile = DiffuserProfile::Cosine;
    return m;
}

DisplayGeometry geometry(double d, double dl) {
    DisplayGeometry g = prototype_geometry(8, 8, 2.0);
    g.gap_diffuser = d;
    g.gap_panels = dl;
    return g;
}

} // namespace

TEST_CASE("cosine diffuser weight") {
    const DiffuserModel m = cosine(7.5);
    CHECK(diffuser_weight(m, 0.0) == 1.0);
    CHECK(diffuser_weight(m, 7.5) == 0.0);
    CHECK(diffuser_weight(m, -7.5) == 0.0);
    CHECK(diffuser_weight(m, 3.75) == Approx(std::cos(std::numbers::pi / 4.0)).epsilon(1e-14));
    CHECK(diffuser_weight(m, 3.75) == Approx(0.7071).epsilon(1e-4));
    CHECK(diffuser_weight(m, 20.0) == 0.0);
    CHECK_THROWS_AS(diffuser_weight(m, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(diffuser_weight(m, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("uniform diffuser weight") {
    DiffuserModel m = cosine(5.0);
    m.profile = DiffuserProfile::Uniform;
    CHECK(diffuser_weight(m, 0.0) == 1.0);
    CHECK(diffuser_weight(m, 4.99) == 1.0);
    CHECK(diffuser_weight(m, 5.0) == 0.0);
}

TEST_CASE("diffuser weight is symmetric and nonincreasing in |theta|") {
    for (double half : {0.5, 7.5, 30.0}) {
        const DiffuserModel m = cosine(half);
        double prev = 2.0;
        for (int i = 0; i <= 200; ++i) {
            const double th = half * 1.2 * i / 200.0;
            const double w = diffuser_weight(m, th);
            CHECK(w <= prev);
            CHECK(w == diffuser_weight(m, -th));
            prev = w;
        }
    }
}

TEST_CASE("footprints") {
    const Footprints proto = diffuser_footprints(geometry(6.0, 19.0), cosine(7.5));
    const double t = std::tan(7.5 * std::numbers::pi / 180.0);
    CHECK(proto.front == Approx(2.0 * 6.0 * t).epsilon(1e-14));
    CHECK(proto.rear == Approx(2.0 * 25.0 * t).epsilon(1e-14));
    CHECK(std::abs(proto.front - 1.580) < 2e-3);
    CHECK(std::abs(proto.rear - 6.584) < 2e-3);

    CHECK(diffuser_footprints(geometry(0.0, 19.0), cosine(7.5)).front == 0.0);
    CHECK(diffuser_footprints(geometry(0.0, 3.0), cosine(40.0)).front == 0.0);
    CHECK(std::abs(diffuser_footprints(geometry(0.3, 19.0), cosine(7.5)).front - 0.079) < 1e-3);
}

TEST_CASE("footprints grow strictly with angle and distance") {
    const Footprints base = diffuser_footprints(geometry(1.0, 10.0), cosine(5.0));
    const Footprints wider = diffuser_footprints(geometry(1.0, 10.0), cosine(6.0));
    const Footprints farther = diffuser_footprints(geometry(1.5, 10.0), cosine(5.0));
    const Footprints deeper = diffuser_footprints(geometry(1.0, 12.0), cosine(5.0));
    CHECK(wider.front > base.front);
    CHECK(wider.rear > base.rear);
    CHECK(farther.front > base.front);
    CHECK(farther.rear > base.rear);
    CHECK(deeper.rear > base.rear);
    CHECK(base.rear >= base.front);
}

TEST_CASE("sampled angular weights have positive mass") {
    for (double half : {0.01, 1.0, 7.5, 89.0}) {
        for (auto profile : {DiffuserProfile::Cosine, DiffuserProfile::Uniform}) {
            for (int samples : {2, 3, 17}) {
                DiffuserModel m = cosine(half);
                m.profile = profile;
                double sum = 0.0;
                for (double th : angular_grid(m, samples)) sum += diffuser_weight(m, th);
                CHECK(sum > 0.0);
            }
        }
    }
}

TEST_CASE("angular grid is a symmetric midpoint rule") {
    const auto grid = angular_grid(cosine(3.0), 6);
    REQUIRE(grid.size() == 6);
    CHECK(grid.front() == Approx(-2.5));
    CHECK(grid.back() == Approx(2.5));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i] == Approx(-grid[grid.size() - 1 - i]));
}

TEST_CASE("default angular sampling resolves the rear footprint") {
    const DisplayGeometry g = geometry(6.0, 19.0);
    const DiffuserModel m = cosine(7.5);
    const int n = default_angular_samples(g, m);
    CHECK(n % 2 == 1);
    // ray spacing on the rear panel is below one pixel
    CHECK(diffuser_footprints(g, m).rear / n < g.panel_pitch);
}

TEST_CASE("geometry validation and derived sizes") {
    DisplayGeometry g = prototype_geometry(10, 6, 3.0);
    CHECK_NOTHROW(g.validate());
    CHECK(g.target_cols() == 30);
    CHECK(g.target_rows() == 18);
    CHECK(g.target_pixels() >= g.panel_pixels());
    CHECK(g.superpixel_pitch() == Approx(0.094));

    DisplayGeometry bad = g;
    bad.panel_pitch = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.gap_panels = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.gap_diffuser = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.sr_factor = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.panel_cols = 5;
    bad.sr_factor = 1.5;  // 7.5 target pixels
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.panel_cols = 6;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("geometry hash is stable and sensitive") {
    const DisplayGeometry a = prototype_geometry(8, 8, 2.0);
    DisplayGeometry b = a;
    CHECK(a.hash() == b.hash());
    b.gap_diffuser += 1e-9;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("diffuser validation") {
    DiffuserModel m = cosine(7.5);
    CHECK_NOTHROW(m.validate());
    m.half_angle = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.half_angle = 90.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = cosine(7.5);
    m.angular_samples = 1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("pattern set and solver config validation") {
    PatternSet p;
    p.front = Eigen::MatrixXd::Constant(4, 2, 0.5);
    p.rear = Eigen::MatrixXd::Constant(4, 2, 0.5);
    p.lower_bound = 0.2;
    CHECK_NOTHROW(p.validate());
    p.front(0, 0) = 0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.front(0, 0) = 1.0 + 1e-12;
    CHECK_NOTHROW(p.validate(1e-9));
    p.rear.resize(3, 2);
    CHECK_THROWS_AS(p.validate(1e-9), std::invalid_argument);

    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.sart_iters = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SolverConfig{};
    c.tol_primal = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = SolverConfig{};
    c.relaxation = 2.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
