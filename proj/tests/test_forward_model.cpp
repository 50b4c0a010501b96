#include <doctest.h>

#include "sres/errors.hpp"
#include "sres/forward_model.hpp"

#include "oracles.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace sres;
using doctest::Approx;

namespace {

DisplayGeometry small_geometry(double d = 0.4, double sr = 2.0) {
    DisplayGeometry g;
    g.panel_cols = 4;
    g.panel_rows = 4;
    g.panel_pitch = 0.282;
    g.gap_panels = 5.0;
    g.gap_diffuser = d;
    g.sr_factor = sr;
    return g;
}

DiffuserModel small_diffuser(double half = 3.0, int samples = 15) {
    DiffuserModel m;
    m.half_angle = half;
    m.angular_samples = samples;
    return m;
}

PatternSet random_patterns(int m, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PatternSet p;
    p.front = Eigen::MatrixXd::NullaryExpr(m, k, [&] { return u(rng); });
    p.rear = Eigen::MatrixXd::NullaryExpr(m, k, [&] { return u(rng); });
    return p;
}

PatternSet constant_patterns(int m, int k, double f, double g) {
    PatternSet p;
    p.front = Eigen::MatrixXd::Constant(m, k, f);
    p.rear = Eigen::MatrixXd::Constant(m, k, g);
    return p;
}

} // namespace

TEST_CASE("zero diffuser gap at native resolution is a permutation") {
    DisplayGeometry g = small_geometry(0.0, 1.0);
    g.gap_panels = 19.0;
    const DiffuserModel m = small_diffuser(0.2, 9);  // rear footprint below one pixel
    const ProjectionOperator P = build_projection(g, m);
    REQUIRE(P.rows() == g.panel_pixels());
    for (const auto& t : P.triples()) {
        CHECK(t.front == t.row);
        CHECK(t.rear == t.row);
        CHECK(t.weight == Approx(1.0));
    }
    CHECK(P.matrix().nonZeros() == P.rows());
}

TEST_CASE("all-ones light field maps to the all-ones image") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        DisplayGeometry g = small_geometry(std::uniform_real_distribution<double>(0.0, 2.0)(rng), 1.0 + (trial % 3));
        g.panel_cols = 3 + trial % 4;
        const ProjectionOperator P = build_projection(g, small_diffuser(1.0 + trial % 5, 7 + trial));
        const Plane img = apply_projection(P, constant_patterns(g.panel_pixels(), 1 + trial % 3, 1.0, 1.0));
        CHECK((img.array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK(P.row_normalized());
        for (int r = 0; r < P.rows(); ++r) CHECK(P.matrix().row(r).sum() == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("apply_projection trivial cases") {
    const DisplayGeometry g = small_geometry();
    const ProjectionOperator P = build_projection(g, small_diffuser());
    for (int k : {1, 3}) {
        CHECK((apply_projection(P, constant_patterns(16, k, 0.0, 0.7)).array().abs()).maxCoeff() == 0.0);
        const Plane flat_img = apply_projection(P, constant_patterns(16, k, 0.6, 0.5));
        CHECK((flat_img.array() - 0.3).abs().maxCoeff() < 1e-12);
        CHECK(flat_img.mean() == Approx(0.3));
    }
}

TEST_CASE("sparse operator matches the dense ray-traced oracle") {
    std::mt19937_64 rng(11);
    const DisplayGeometry g = small_geometry(0.6, 2.0);  // 4x4 panels, 8x8 target
    for (auto profile : {DiffuserProfile::Cosine, DiffuserProfile::Uniform}) {
        DiffuserModel m = small_diffuser(4.0, 21);
        m.profile = profile;
        const ProjectionOperator P = build_projection(g, m);
        const Eigen::MatrixXd dense = oracle::dense_projection(g, m);
        for (int k : {1, 2, 4}) {
            const PatternSet pat = random_patterns(16, k, rng);
            const Eigen::VectorXd expect = dense * oracle::vec_lightfield(pat);
            CHECK((flat(apply_projection(P, pat)) - expect).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("adjoint") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    const ProjectionOperator P = build_projection(small_geometry(), small_diffuser());
    CHECK(apply_adjoint(P, Eigen::VectorXd::Zero(P.rows())).cwiseAbs().maxCoeff() == 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd L = Eigen::VectorXd::NullaryExpr(P.active_size(), [&] { return n(rng); });
        const Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(P.rows(), [&] { return n(rng); });
        CHECK(std::abs((P.matrix() * L).dot(r) - L.dot(apply_adjoint(P, r))) < 1e-10);
    }
    const int row = 9;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(P.rows());
    e[row] = 1.0;
    const Eigen::VectorXd back = apply_adjoint(P, e);
    std::map<std::pair<int, int>, double> expect;
    for (const auto& t : P.triples())
        if (t.row == row) expect[{t.front, t.rear}] = t.weight;
    int nonzero = 0;
    for (int c = 0; c < P.active_size(); ++c) {
        if (back[c] == 0.0) continue;
        ++nonzero;
        const RayPair& p = P.support()[c];
        REQUIRE(expect.count({p.front, p.rear}) == 1);
        CHECK(back[c] == expect[{p.front, p.rear}]);
    }
    CHECK(nonzero == static_cast<int>(expect.size()));
    CHECK_THROWS_AS(apply_adjoint(P, Eigen::VectorXd::Zero(P.rows() + 1)), std::invalid_argument);
}

TEST_CASE("frames superpose linearly") {
    std::mt19937_64 rng(8);
    const ProjectionOperator P = build_projection(small_geometry(), small_diffuser());
    const PatternSet pat = random_patterns(16, 3, rng);
    Plane sum = Plane::Zero(P.target_rows(), P.target_cols());
    for (int k = 0; k < 3; ++k) {
        PatternSet one;
        one.front = pat.front.col(k);
        one.rear = pat.rear.col(k);
        sum += apply_projection(P, one) / 3.0;
    }
    CHECK((sum - apply_projection(P, pat)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single lit front pixel reproduces its diffuser footprint") {
    DisplayGeometry g = small_geometry(1.2, 4.0);
    g.panel_cols = g.panel_rows = 6;
    const DiffuserModel m = small_diffuser(6.0, 31);
    const ProjectionOperator P = build_projection(g, m);
    const int a = 2 * 6 + 3;
    PatternSet pat = constant_patterns(36, 1, 0.0, 1.0);
    pat.front(a, 0) = 1.0;
    const Plane img = apply_projection(P, pat);
    // oracle: fraction of each superpixel's ray weight passing through pixel a
    const Eigen::MatrixXd dense = oracle::dense_projection(g, m);
    const double s1 = diffuser_footprints(g, m).front;
    const double cx = (3 + 0.5) * g.panel_pitch, cy = (2 + 0.5) * g.panel_pitch;
    for (int y = 0; y < g.target_rows(); ++y) {
        for (int x = 0; x < g.target_cols(); ++x) {
            const int row = y * g.target_cols() + x;
            CHECK(img(y, x) == Approx(dense.row(row).segment(static_cast<Eigen::Index>(a) * 36, 36).sum()).epsilon(1e-12));
            const double px = (x + 0.5) * g.superpixel_pitch(), py = (y + 0.5) * g.superpixel_pitch();
            if (img(y, x) > 0.0) {
                CHECK(std::abs(px - cx) <= 0.5 * (g.panel_pitch + s1) + 1e-9);
                CHECK(std::abs(py - cy) <= 0.5 * (g.panel_pitch + s1) + 1e-9);
            }
        }
    }
    CHECK(img(10, 14) > 0.5);  // directly in front of the lit pixel
}

TEST_CASE("every ray pair lies on a line through its superpixel centre") {
    const DisplayGeometry g = small_geometry(0.8, 3.0);
    const DiffuserModel m = small_diffuser(5.0, 25);
    const ProjectionOperator P = build_projection(g, m);
    const double p = g.panel_pitch, d = g.gap_diffuser, dr = g.gap_diffuser + g.gap_panels;
    const double tmax = std::tan(m.half_angle * std::numbers::pi / 180.0);
    auto consistent = [&](double x, int front, int rear) {
        // tangents through front cell [front p, (front + 1) p), limited to the diffuser cone
        const double lo = std::max(-tmax, (x - (front + 1) * p) / d), hi = std::min(tmax, (x - front * p) / d);
        if (lo > hi) return false;
        const double r0 = (x - dr * hi) / p, r1 = (x - dr * lo) / p;
        return rear >= std::floor(r0) && rear <= std::floor(r1);
    };
    for (const auto& t : P.triples()) {
        const int tx = t.row % P.target_cols(), ty = t.row / P.target_cols();
        const double x = (tx + 0.5) * g.superpixel_pitch(), y = (ty + 0.5) * g.superpixel_pitch();
        CHECK(consistent(x, t.front % g.panel_cols, t.rear % g.panel_cols));
        CHECK(consistent(y, t.front / g.panel_cols, t.rear / g.panel_cols));
        CHECK(t.weight > 0.0);
    }
}

TEST_CASE("rows see several rays once the front footprint exceeds a pixel") {
    const DisplayGeometry g = prototype_geometry(8, 8, 2.0);  // s1 = 1.58 mm > 0.282 mm
    DiffuserModel m = prototype_diffuser();
    m.angular_samples = 61;
    const ProjectionOperator P = build_projection(g, m);
    for (int r = 0; r < P.rows(); ++r) {
        std::set<int> fronts;
        for (ProjectionOperator::Matrix::InnerIterator it(P.matrix(), r); it; ++it) fronts.insert(P.support()[it.col()].front);
        CHECK(fronts.size() > 1);
    }
}

TEST_CASE("windowed operator equals the matching rows of the full operator") {
    const DisplayGeometry g = small_geometry(0.5, 2.0);
    const DiffuserModel m = small_diffuser(3.0, 17);
    const ProjectionOperator full = build_projection(g, m);
    const TargetWindow w{2, 3, 4, 3};
    const ProjectionOperator part = build_projection(g, m, w);
    REQUIRE(part.rows() == 12);
    std::map<std::tuple<int, int, int>, double> ref;
    for (const auto& t : full.triples()) ref[{t.row, t.front, t.rear}] = t.weight;
    for (const auto& t : part.triples()) {
        const int row = (w.row0 + t.row / w.cols) * full.target_cols() + w.col0 + t.row % w.cols;
        CHECK(ref.at({row, t.front, t.rear}) == Approx(t.weight).epsilon(1e-14));
    }
    CHECK_THROWS_AS(build_projection(g, m, TargetWindow{6, 0, 4, 1}), std::invalid_argument);
}

TEST_CASE("superpixel without any ray inside both panels is reported") {
    DisplayGeometry g = small_geometry(0.0, 1.0);
    g.panel_cols = g.panel_rows = 1;
    g.gap_panels = 19.0;
    const DiffuserModel m = small_diffuser(10.0, 2);  // rays at +-5 degrees miss the 1-pixel rear panel
    try {
        build_projection(g, m);
        FAIL("expected a construction error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("row 0") != std::string::npos);
    }
}

TEST_CASE("render_view") {
    const DisplayGeometry g = small_geometry(0.3, 2.0);
    const Plane v = render_view(constant_patterns(16, 1, 0.5, 0.8), g, 0.7, -0.4);
    CHECK((v.array() - 0.4).abs().maxCoeff() < 1e-15);

    DisplayGeometry g0 = small_geometry(0.0, 1.0);
    std::mt19937_64 rng(2);
    const PatternSet pat = random_patterns(16, 3, rng);
    const Plane on_axis = render_view(pat, g0, 0.0, 0.0);
    for (int a = 0; a < 16; ++a) CHECK(flat(on_axis)[a] == Approx(pat.front.row(a).dot(pat.rear.row(a)) / 3.0));

    // a steep view misses the rear panel for every pixel
    CHECK(render_view(pat, g0, 45.0, 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("native display simulation") {
    const DisplayGeometry g1 = small_geometry(0.3, 1.0);
    std::mt19937_64 rng(4);
    const Plane img = Plane::NullaryExpr(4, 4, [&] { return std::uniform_real_distribution<double>()(rng); });
    CHECK((simulate_native(img, g1) - img).cwiseAbs().maxCoeff() < 1e-15);

    const DisplayGeometry g2 = small_geometry(0.3, 2.0);
    CHECK((simulate_native(Plane::Constant(8, 8, 0.3), g2).array() - 0.3).abs().maxCoeff() < 1e-15);
    Plane checker(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) checker(y, x) = (x + y) % 2;
    CHECK((simulate_native(checker, g2).array() - 0.5).abs().maxCoeff() < 1e-15);

    DisplayGeometry g15 = small_geometry(0.3, 1.5);  // 4 -> 6 pixels, non-integer alignment
    const Plane up = simulate_native(Plane::Constant(6, 6, 0.7), g15);
    CHECK((up.array() - 0.7).abs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(simulate_native(Plane::Zero(5, 5), g2), std::invalid_argument);
}

TEST_CASE("operator serialization round trip") {
    const ProjectionOperator P = build_projection(small_geometry(), small_diffuser());
    std::stringstream ss;
    write_operator(ss, P);
    const ProjectionOperator Q = read_operator(ss, P.target_cols());
    CHECK(Q.rows() == P.rows());
    CHECK(Q.target_rows() == P.target_rows());
    CHECK(Q.row_normalized());
    const auto a = P.triples(), b = Q.triples();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].row == b[i].row);
        CHECK(a[i].front == b[i].front);
        CHECK(a[i].rear == b[i].rear);
        CHECK(a[i].weight == b[i].weight);
    }
    std::stringstream truncated(ss.str().substr(0, 40));
    CHECK_THROWS_AS(read_operator(truncated, P.target_cols()), IoError);
}

TEST_CASE("dimension mismatch") {
    const ProjectionOperator P = build_projection(small_geometry(), small_diffuser());
    CHECK_THROWS_AS(apply_projection(P, constant_patterns(9, 1, 1.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(render_view(constant_patterns(9, 1, 1.0, 1.0), small_geometry(), 0.0, 0.0), std::invalid_argument);
}
