#include "sres/sweep.hpp"

#include "sres/baselines.hpp"
#include "sres/conditioning.hpp"
#include "sres/errors.hpp"
#include "sres/forward_model.hpp"
#include "sres/metrics.hpp"
#include "sres/solver.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sres {
namespace {

Eigen::MatrixXd area_weights(int from, int to) {
    // overlap of destination cell i with source cell j, in destination-cell units
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(to, from);
    const double scale = static_cast<double>(from) / to;
    for (int i = 0; i < to; ++i) {
        const double lo = i * scale, hi = (i + 1) * scale;
        for (int j = static_cast<int>(std::floor(lo)); j < from && j < hi; ++j) {
            const double ov = std::min(hi, j + 1.0) - std::max(lo, static_cast<double>(j));
            if (ov > 0.0) m(i, j) = ov / scale;
        }
    }
    return m;
}

double superres_psnr(const Plane& target, const ProjectionOperator& P, int rank, const SolverConfig& cfg) {
    const SuperresResult r = decompose_superres(target, P, rank, cfg);
    return psnr(apply_projection(P, r.patterns).cwiseMax(0.0).cwiseMin(1.0), target);
}

std::string point_label(const SweepSpec& spec, double value, double spread) {
    std::ostringstream os;
    os << sweep_kind_name(spec.kind) << " sweep at value " << value;
    if (spec.kind == SweepKind::Conditioning) os << ", spread " << spread;
    return os.str();
}

} // namespace

SweepKind parse_sweep_kind(const std::string& name) {
    if (name == "conditioning") return SweepKind::Conditioning;
    if (name == "distance" || name == "distance_psnr") return SweepKind::DistancePsnr;
    if (name == "rank" || name == "rank_psnr") return SweepKind::RankPsnr;
    if (name == "factor" || name == "factor_psnr") return SweepKind::FactorPsnr;
    throw std::invalid_argument("unknown sweep kind '" + name + "'");
}

std::string sweep_kind_name(SweepKind kind) {
    switch (kind) {
    case SweepKind::Conditioning:
        return "conditioning";
    case SweepKind::DistancePsnr:
        return "distance_psnr";
    case SweepKind::RankPsnr:
        return "rank_psnr";
    case SweepKind::FactorPsnr:
        return "factor_psnr";
    }
    return "unknown";
}

void SweepResult::write_csv(std::ostream& os) const {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    os.precision(10);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << '\n';
    }
}

Plane resample_area(const Plane& image, int cols, int rows) {
    if (cols < 1 || rows < 1) throw std::invalid_argument("resample size must be positive");
    if (image.cols() == cols && image.rows() == rows) return image;
    return area_weights(static_cast<int>(image.rows()), rows) * image *
           area_weights(static_cast<int>(image.cols()), cols).transpose();
}

ImageSource resampling_source(Plane image) {
    return [img = std::move(image)](int cols, int rows) { return resample_area(img, cols, rows); };
}

SweepResult sweep(const SweepSpec& spec, const ImageSource& image, const SolverConfig& cfg) {
    if (spec.values.empty()) throw std::invalid_argument("sweep grid is empty");
    if (spec.kind == SweepKind::Conditioning && spec.spreads.empty()) throw std::invalid_argument("spread grid is empty");
    if (spec.kind != SweepKind::Conditioning && !image) throw std::invalid_argument("PSNR sweeps need a test image");
    cfg.validate();

    SweepResult res;
    res.kind = spec.kind;
    switch (spec.kind) {
    case SweepKind::Conditioning:
        res.columns = {"distance", "spread", "condition"};
        break;
    case SweepKind::DistancePsnr:
        res.columns = {"distance", "psnr", "native_psnr"};
        break;
    case SweepKind::RankPsnr:
        res.columns = {"rank", "psnr"};
        break;
    case SweepKind::FactorPsnr:
        res.columns = {"factor", "psnr", "native_psnr", "wobulation_psnr", "cubic_psnr"};
        break;
    }

    // one operator serves the whole rank sweep
    ProjectionOperator rank_op;
    Plane rank_target;
    if (spec.kind == SweepKind::RankPsnr) {
        rank_op = build_projection(spec.geometry, spec.diffuser);
        rank_target = image(spec.geometry.target_cols(), spec.geometry.target_rows());
    }

    for (double value : spec.values) {
        const std::vector<double> inner = spec.kind == SweepKind::Conditioning ? spec.spreads : std::vector<double>{0.0};
        for (double spread : inner) {
            try {
                switch (spec.kind) {
                case SweepKind::Conditioning: {
                    DisplayGeometry g = spec.geometry;
                    g.gap_diffuser = value;
                    DiffuserModel m = spec.diffuser;
                    m.half_angle = 0.5 * spread;
                    const double c = condition_number(conditioning_tile(g, m, spec.tile));
                    res.rows.push_back({value, spread, c});
                    break;
                }
                case SweepKind::DistancePsnr: {
                    DisplayGeometry g = spec.geometry;
                    g.gap_diffuser = value;
                    const Plane t = image(g.target_cols(), g.target_rows());
                    const ProjectionOperator P = build_projection(g, spec.diffuser);
                    res.rows.push_back({value, superres_psnr(t, P, spec.rank, cfg), psnr(simulate_native(t, g), t)});
                    break;
                }
                case SweepKind::RankPsnr: {
                    const int k = static_cast<int>(std::lround(value));
                    res.rows.push_back({value, superres_psnr(rank_target, rank_op, k, cfg)});
                    break;
                }
                case SweepKind::FactorPsnr: {
                    DisplayGeometry g = spec.geometry;
                    g.sr_factor = value;
                    g.validate();
                    const Plane t = image(g.target_cols(), g.target_rows());
                    const ProjectionOperator P = build_projection(g, spec.diffuser);
                    const int s = static_cast<int>(std::lround(value));
                    const double wob = std::abs(value - s) < 1e-12
                                           ? psnr(baseline_wobulation(t, std::min(spec.rank, s * s), g).perceived, t)
                                           : std::nan("");
                    res.rows.push_back({value, superres_psnr(t, P, spec.rank, cfg), psnr(simulate_native(t, g), t), wob,
                                        psnr(baseline_cubic(t, g).cwiseMax(0.0).cwiseMin(1.0), t)});
                    break;
                }
                }
            } catch (const SolverDiverged& e) {
                throw SolverDiverged(e.iteration(), point_label(spec, value, spread) + ": " + e.what());
            } catch (const std::exception& e) {
                throw AnalysisError(point_label(spec, value, spread) + ": " + e.what());
            }
        }
    }
    return res;
}

} // namespace sres
