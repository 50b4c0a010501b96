#include <doctest.h>

#include "sres/baselines.hpp"
#include "sres/charts.hpp"
#include "sres/conditioning.hpp"
#include "sres/errors.hpp"
#include "sres/metrics.hpp"
#include "sres/mtf.hpp"
#include "sres/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace sres;
using doctest::Approx;

namespace {

ProjectionOperator diagonal(const std::vector<double>& w) {
    std::vector<ProjectionTriple> t;
    for (int i = 0; i < static_cast<int>(w.size()); ++i) t.push_back({i, i, i, w[static_cast<std::size_t>(i)]});
    return ProjectionOperator::from_triples(static_cast<int>(w.size()), 1, static_cast<int>(w.size()), t, false);
}

Plane random_plane(int cols, int rows, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    return Plane::NullaryExpr(rows, cols, [&] { return u(rng); });
}

double gaussian_mtf(double sigma, double cycles_per_pixel) {
    return std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma * cycles_per_pixel * cycles_per_pixel);
}

} // namespace

TEST_CASE("psnr") {
    const Plane a = random_plane(8, 6, 1);
    CHECK(psnr(a, a) == kPsnrCap);
    CHECK(psnr(Plane::Zero(4, 4), Plane::Constant(4, 4, 0.1)) == Approx(20.0));
    const Plane b = random_plane(8, 6, 2);
    double sq = 0.0;
    for (int i = 0; i < a.size(); ++i) sq += std::pow(a.data()[i] - b.data()[i], 2);
    CHECK(psnr(a, b) == Approx(10.0 * std::log10(a.size() / sq)));
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(psnr(a, a + 0.5 * (b - a)) > psnr(a, b));
    CHECK_THROWS_AS(psnr(a, Plane::Zero(8, 6)), std::invalid_argument);

    Plane mask = Plane::Zero(4, 4);
    mask(0, 0) = 1.0;
    Plane x = Plane::Constant(4, 4, 0.9);
    x(0, 0) = 0.1;
    CHECK(psnr_masked(x, Plane::Zero(4, 4), mask) == Approx(20.0));
    CHECK_THROWS_AS(psnr_masked(x, x, Plane::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("condition number") {
    CHECK(condition_number(diagonal({1.0, 1.0, 1.0})) == Approx(1.0));
    CHECK(condition_number(diagonal({1.0, 2.0})) == Approx(2.0));
    CHECK(condition_number(diagonal({0.5, 3.0, 1.0})) == Approx(6.0));
    CHECK(condition_number(diagonal({1.0, 1e-14})) == std::numeric_limits<double>::infinity());

    // rank-deficient 2 x 2: both rows see the same two rays equally
    const std::vector<ProjectionTriple> t{{0, 0, 0, 0.5}, {0, 1, 1, 0.5}, {1, 0, 0, 0.5}, {1, 1, 1, 0.5}};
    CHECK(condition_number(ProjectionOperator::from_triples(2, 1, 2, t, false)) ==
          std::numeric_limits<double>::infinity());

    // invariant to a row permutation and a global scale; compare against a dense SVD oracle
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<ProjectionTriple> tr, perm, scaled;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const double w = u(rng);
            dense(r, c) = w;
            tr.push_back({r, c, c, w});
            perm.push_back({3 - r, c, c, w});
            scaled.push_back({r, c, c, 7.0 * w});
        }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    const double expect = svd.singularValues()(0) / svd.singularValues()(3);
    CHECK(condition_number(ProjectionOperator::from_triples(4, 1, 4, tr, false)) == Approx(expect).epsilon(1e-9));
    CHECK(condition_number(ProjectionOperator::from_triples(4, 1, 4, perm, false)) == Approx(expect).epsilon(1e-9));
    CHECK(condition_number(ProjectionOperator::from_triples(4, 1, 4, scaled, false)) == Approx(expect).epsilon(1e-9));

    std::vector<ProjectionTriple> big;
    for (int r = 0; r <= kConditioningMaxRows; ++r) big.push_back({r, 0, 0, 1.0});
    CHECK_THROWS_AS(condition_number(ProjectionOperator::from_triples(kConditioningMaxRows + 1, 1, 1, big, false)),
                    AnalysisError);
}

TEST_CASE("conditioning tile sits inside the panel") {
    DisplayGeometry base = simulation_geometry(4, 4, 2.0);
    base.gap_diffuser = 1.0;
    DiffuserModel m = simulation_diffuser();
    m.half_angle = 3.0;
    const ProjectionOperator tile = conditioning_tile(base, m, 6);
    CHECK(tile.rows() == 36);
    // growing the surrounding panel must not change the tile's weights
    const double rear = diffuser_footprints(base, m).rear;
    const int margin = static_cast<int>(std::ceil(0.5 * rear / base.panel_pitch)) + 2;
    DisplayGeometry wide = base;
    wide.panel_cols = wide.panel_rows = 3 + 2 * margin + 6;
    const int off = (wide.target_cols() - 6) / 2;
    const ProjectionOperator ref = build_projection(wide, m, TargetWindow{off, off, 6, 6});
    auto weights = [](const ProjectionOperator& P) {
        std::vector<double> w;
        for (const auto& t : P.triples()) w.push_back(std::round(t.weight * 1e9));
        std::sort(w.begin(), w.end());
        return w;
    };
    CHECK(weights(tile) == weights(ref));
    CHECK(condition_number(tile) == Approx(condition_number(ref)).epsilon(1e-6));
    CHECK_THROWS_AS(conditioning_tile(base, m, 0), std::invalid_argument);
}

TEST_CASE("slanted-edge MTF") {
    SUBCASE("matches the analytic response of a Gaussian-blurred edge") {
        for (double sigma : {0.7, 1.2, 2.0}) {
            const MtfCurve c = mtf_slanted_edge(charts::slanted_edge(80, 60, 5.0, 0.2, 0.8, sigma), 5.0, 4);
            CHECK(c.edge_angle == Approx(5.0).epsilon(0.02));
            CHECK_FALSE(c.slant_warning);
            for (std::size_t i = 0; i < c.frequencies.size() && c.frequencies[i] <= 1.0; ++i)
                CHECK(std::abs(c.magnitudes[i] - gaussian_mtf(sigma, c.frequencies[i] / 2.0)) < 0.03);
        }
    }
    SUBCASE("curve shape") {
        const MtfCurve c = mtf_slanted_edge(charts::slanted_edge(64, 48, 6.0), 6.0, 4);
        CHECK(c.magnitudes.front() == Approx(1.0));
        CHECK(c.frequencies.front() == 0.0);
        for (std::size_t i = 1; i < c.frequencies.size(); ++i) CHECK(c.frequencies[i] > c.frequencies[i - 1]);
        CHECK(c.at(0.0) == Approx(1.0));
        CHECK(c.at(c.frequencies[1] * 0.5) == Approx(0.5 * (c.magnitudes[0] + c.magnitudes[1])));
        CHECK(c.esf.size() > 16);
        std::ostringstream os;
        c.write_csv(os);
        CHECK(os.str().rfind("frequency,mtf\n", 0) == 0);
    }
    SUBCASE("frequency scale follows the pixels per panel pixel") {
        const Plane edge = charts::slanted_edge(64, 48, 5.0, 0.2, 0.8, 1.0);
        const MtfCurve a = mtf_slanted_edge(edge, 5.0, 4, 1.0), b = mtf_slanted_edge(edge, 5.0, 4, 2.0);
        REQUIRE(a.frequencies.size() == b.frequencies.size());
        for (std::size_t i = 0; i < a.frequencies.size(); ++i) {
            CHECK(b.frequencies[i] == Approx(2.0 * a.frequencies[i]));
            CHECK(b.magnitudes[i] == Approx(a.magnitudes[i]));
        }
    }
    SUBCASE("repeatable and insensitive to contrast") {
        const Plane e = charts::slanted_edge(64, 48, 4.0);
        const MtfCurve a = mtf_slanted_edge(e, 4.0, 4);
        const MtfCurve b = mtf_slanted_edge((e.array() * 0.5 + 0.1).matrix(), 4.0, 4);
        for (std::size_t i = 0; i < a.magnitudes.size(); ++i) CHECK(std::abs(a.magnitudes[i] - b.magnitudes[i]) < 1e-3);
    }
    SUBCASE("slant warning") {
        CHECK(mtf_slanted_edge(charts::slanted_edge(64, 48, 15.0), 15.0, 4).slant_warning);
        CHECK(mtf_slanted_edge(charts::slanted_edge(64, 48, 5.0), 12.0, 4).slant_warning);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(mtf_slanted_edge(Plane::Constant(64, 48, 0.5), 5.0, 4), AnalysisError);
        CHECK_THROWS_AS(mtf_slanted_edge(charts::slanted_edge(64, 48, 5.0), 5.0, 0), std::invalid_argument);
    }
}

TEST_CASE("cubic baseline") {
    const DisplayGeometry g = simulation_geometry(8, 8, 2.0);
    CHECK((baseline_cubic(Plane::Constant(16, 16, 0.4), g).array() - 0.4).abs().maxCoeff() < 1e-12);
    const Plane img = random_plane(8, 8, 4);
    CHECK((baseline_cubic(img, simulation_geometry(8, 8, 1.0)) - img).cwiseAbs().maxCoeff() < 1e-12);
    Plane step = Plane::Zero(16, 16);
    step.rightCols(8).setOnes();
    const Plane up = baseline_cubic(step, g);
    CHECK(up.maxCoeff() > 1.0);  // Keys kernel rings at a step
    CHECK(up.minCoeff() < 0.0);
}

TEST_CASE("wobulation") {
    SUBCASE("shifts") {
        const auto s = wobulation_shifts(4, 2);
        REQUIRE(s.size() == 4);
        CHECK(s[0] == std::pair<int, int>{0, 0});
        CHECK(s[1] == std::pair<int, int>{1, 1});
        std::set<std::pair<int, int>> unique(s.begin(), s.end());
        CHECK(unique.size() == 4);
        CHECK_THROWS_AS(wobulation_shifts(10, 3), std::invalid_argument);
        CHECK_THROWS_AS(wobulation_shifts(0, 3), std::invalid_argument);
    }
    SUBCASE("single frame equals the native display") {
        const DisplayGeometry g = simulation_geometry(8, 8, 2.0);
        const Plane t = charts::natural_image(0, 16, 16);
        const WobulationResult r = baseline_wobulation(t, 1, g);
        CHECK((r.perceived - simulate_native(t, g)).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("all phases recover a target the wobulator can show") {
        const DisplayGeometry g = simulation_geometry(8, 8, 2.0);
        const auto shifts = wobulation_shifts(4, 2);
        std::vector<Plane> frames;
        for (int k = 0; k < 4; ++k) frames.push_back(random_plane(8, 8, 10 + k, 0.1, 0.9));
        const Plane t = wobulation_render(frames, shifts, g);
        const WobulationResult r = baseline_wobulation(t, 4, g, 3000);
        CHECK(psnr(r.perceived, t) > 40.0);
        for (const auto& f : r.subframes) {
            CHECK(f.minCoeff() >= 0.0);
            CHECK(f.maxCoeff() <= 1.0);
        }
    }
    SUBCASE("errors") {
        const Plane t = Plane::Zero(16, 16);
        CHECK_THROWS_AS(baseline_wobulation(t, 5, simulation_geometry(8, 8, 2.0)), std::invalid_argument);
        CHECK_THROWS_AS(baseline_wobulation(Plane::Zero(12, 12), 2, simulation_geometry(8, 8, 1.5)),
                        std::invalid_argument);
    }
}

TEST_CASE("sweeps") {
    SolverConfig cfg;
    cfg.outer_iters = 10;
    cfg.polish_iters = 20;
    SweepSpec spec;
    spec.geometry = simulation_geometry(6, 6, 2.0);
    spec.diffuser = simulation_diffuser();
    const ImageSource img = resampling_source(charts::natural_image(0, 24, 24));

    SUBCASE("one-point grids") {
        spec.kind = SweepKind::Conditioning;
        spec.values = {0.3};
        spec.spreads = {2.0};
        spec.tile = 4;
        SweepResult r = sweep(spec, nullptr, cfg);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0][2] >= 1.0);

        spec.kind = SweepKind::DistancePsnr;
        r = sweep(spec, img, cfg);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].size() == 3);

        spec.kind = SweepKind::RankPsnr;
        spec.values = {2.0};
        r = sweep(spec, img, cfg);
        CHECK(r.columns == std::vector<std::string>{"rank", "psnr"});

        spec.kind = SweepKind::FactorPsnr;
        spec.rank = 4;
        r = sweep(spec, img, cfg);
        REQUIRE(r.rows[0].size() == 5);
        std::ostringstream os;
        r.write_csv(os);
        CHECK(os.str().rfind("factor,psnr,native_psnr,wobulation_psnr,cubic_psnr\n", 0) == 0);
    }
    SUBCASE("failures name the grid point") {
        spec.kind = SweepKind::RankPsnr;
        spec.values = {2.0, 100.0};
        try {
            sweep(spec, img, cfg);
            FAIL("expected an analysis error");
        } catch (const AnalysisError& e) {
            CHECK(std::string(e.what()).find("rank_psnr sweep at value 100") != std::string::npos);
        }
        spec.values.clear();
        CHECK_THROWS_AS(sweep(spec, img, cfg), std::invalid_argument);
    }
    SUBCASE("kind names") {
        for (auto k : {SweepKind::Conditioning, SweepKind::DistancePsnr, SweepKind::RankPsnr, SweepKind::FactorPsnr})
            CHECK(parse_sweep_kind(sweep_kind_name(k)) == k);
        CHECK(parse_sweep_kind("rank") == SweepKind::RankPsnr);
        CHECK_THROWS_AS(parse_sweep_kind("bogus"), std::invalid_argument);
    }
    SUBCASE("area resampling preserves the mean") {
        const Plane p = random_plane(9, 7, 5);
        CHECK(resample_area(p, 4, 5).mean() == Approx(p.mean()));
        CHECK(resample_area(p, 18, 14).mean() == Approx(p.mean()));
    }
}

TEST_CASE("charts") {
    for (int i = 0; i < charts::natural_image_count(); ++i) {
        const Plane a = charts::natural_image(i, 32, 24), b = charts::natural_image(i, 32, 24);
        CHECK(a == b);
        CHECK(a.minCoeff() >= 0.0);
        CHECK(a.maxCoeff() <= 1.0);
        CHECK(a.maxCoeff() - a.minCoeff() > 0.3);
    }
    CHECK_THROWS_AS(charts::natural_image(3, 8, 8), std::out_of_range);
    const Plane c = charts::checkerboard(4, 4, 2);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(0, 2) == 0.0);
    const Plane e = charts::slanted_edge(32, 16, 5.0);
    CHECK(e(8, 0) == Approx(0.2));
    CHECK(e(8, 31) == Approx(0.8));
    const Plane h = charts::hdr_test_image(8, 8);
    CHECK(h(7, 0) == 0.0);
    CHECK(h(7, 7) == 1.0);
    const Plane ch = charts::chirp(64, 4, 2.0);
    CHECK(ch.minCoeff() >= 0.0);
    CHECK(ch.maxCoeff() <= 1.0);
}
