#include "sres/forward_model.hpp"

#include "sres/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sres {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void build_csr(int n, const std::vector<RayPair>& pairs, bool by_front, std::vector<int>& ptr, std::vector<int>& idx) {
    ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& p : pairs) ++ptr[static_cast<std::size_t>(by_front ? p.front : p.rear) + 1];
    for (int i = 0; i < n; ++i) ptr[static_cast<std::size_t>(i) + 1] += ptr[static_cast<std::size_t>(i)];
    idx.resize(pairs.size());
    std::vector<int> fill(ptr.begin(), ptr.end() - 1);
    for (int e = 0; e < static_cast<int>(pairs.size()); ++e) {
        const int key = by_front ? pairs[static_cast<std::size_t>(e)].front : pairs[static_cast<std::size_t>(e)].rear;
        idx[static_cast<std::size_t>(fill[static_cast<std::size_t>(key)]++)] = e;
    }
}

// One axis of the separable ray bundle: for every target coordinate, the merged
// (front, rear, weight) cells crossed by the sampled rays.
struct AxisCell {
    int pair = 0;  // index into AxisBundle::pairs
    double weight = 0.0;
};

struct AxisBundle {
    std::vector<std::pair<int, int>> pairs;    // unique (front, rear) 1D pairs, sorted
    std::vector<std::vector<AxisCell>> cells;  // per target coordinate, sorted by pair
};

AxisBundle trace_axis(int panel_count, int first_target, int target_count, const DisplayGeometry& geom,
                      const DiffuserModel& model, const std::vector<double>& angles) {
    const double pitch = geom.panel_pitch;
    const double sub = geom.superpixel_pitch();
    std::vector<double> tangents, weights;
    for (double th : angles) {
        tangents.push_back(std::tan(th * kDegToRad));
        weights.push_back(diffuser_weight(model, th));
    }

    struct Hit {
        int front, rear;
        double w;
    };
    std::vector<std::vector<Hit>> hits(static_cast<std::size_t>(target_count));
    std::vector<std::pair<int, int>> all;
    for (int i = 0; i < target_count; ++i) {
        const double x = (first_target + i + 0.5) * sub;
        auto& row = hits[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < angles.size(); ++j) {
            if (weights[j] <= 0.0) continue;
            const int a = static_cast<int>(std::floor((x - geom.gap_diffuser * tangents[j]) / pitch));
            const int b = static_cast<int>(std::floor((x - (geom.gap_diffuser + geom.gap_panels) * tangents[j]) / pitch));
            if (a < 0 || a >= panel_count || b < 0 || b >= panel_count) continue;
            row.push_back({a, b, weights[j]});
        }
        std::sort(row.begin(), row.end(), [](const Hit& l, const Hit& r) {
            return l.front != r.front ? l.front < r.front : l.rear < r.rear;
        });
        std::vector<Hit> merged;
        for (const Hit& h : row) {
            if (!merged.empty() && merged.back().front == h.front && merged.back().rear == h.rear)
                merged.back().w += h.w;
            else
                merged.push_back(h);
        }
        row = std::move(merged);
        for (const Hit& h : row) all.emplace_back(h.front, h.rear);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    AxisBundle bundle;
    bundle.pairs = std::move(all);
    bundle.cells.resize(static_cast<std::size_t>(target_count));
    for (int i = 0; i < target_count; ++i) {
        for (const Hit& h : hits[static_cast<std::size_t>(i)]) {
            const auto it = std::lower_bound(bundle.pairs.begin(), bundle.pairs.end(), std::make_pair(h.front, h.rear));
            bundle.cells[static_cast<std::size_t>(i)].push_back({static_cast<int>(it - bundle.pairs.begin()), h.w});
        }
    }
    return bundle;
}

Eigen::MatrixXd box_overlap(int panel_count, int target_count, double factor) {
    // overlap(a, i) = |[i/s, (i+1)/s) ∩ [a, a+1)| in panel-pixel units
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(panel_count, target_count);
    for (int i = 0; i < target_count; ++i) {
        const double lo = i / factor, hi = (i + 1) / factor;
        for (int a = std::max(0, static_cast<int>(std::floor(lo))); a < panel_count && a < hi; ++a) {
            const double ov = std::min(hi, a + 1.0) - std::max(lo, static_cast<double>(a));
            if (ov > 0.0) m(a, i) = ov;
        }
    }
    return m;
}

} // namespace

RaySupport::RaySupport(int panel_pixels, std::vector<RayPair> pairs) : panel_pixels_(panel_pixels), pairs_(std::move(pairs)) {
    for (const auto& p : pairs_) {
        if (p.front < 0 || p.front >= panel_pixels_ || p.rear < 0 || p.rear >= panel_pixels_)
            throw std::invalid_argument("ray pair outside panel bounds");
    }
    build_csr(panel_pixels_, pairs_, true, front_ptr_, front_idx_);
    build_csr(panel_pixels_, pairs_, false, rear_ptr_, rear_idx_);
}

std::span<const int> RaySupport::entries_of_front(int a) const {
    const auto lo = static_cast<std::size_t>(front_ptr_[static_cast<std::size_t>(a)]);
    const auto hi = static_cast<std::size_t>(front_ptr_[static_cast<std::size_t>(a) + 1]);
    return {front_idx_.data() + lo, hi - lo};
}

std::span<const int> RaySupport::entries_of_rear(int b) const {
    const auto lo = static_cast<std::size_t>(rear_ptr_[static_cast<std::size_t>(b)]);
    const auto hi = static_cast<std::size_t>(rear_ptr_[static_cast<std::size_t>(b) + 1]);
    return {rear_idx_.data() + lo, hi - lo};
}

Eigen::VectorXd lightfield_from_patterns(const RaySupport& support, const PatternSet& pat) {
    if (pat.panel_pixels() != support.panel_pixels()) throw std::invalid_argument("pattern size does not match support");
    const double inv_k = 1.0 / pat.rank();
    Eigen::VectorXd v(support.size());
    for (int e = 0; e < support.size(); ++e) {
        const RayPair& p = support[e];
        v[e] = inv_k * pat.front.row(p.front).dot(pat.rear.row(p.rear));
    }
    return v;
}

ProjectionOperator::ProjectionOperator(int target_cols, int target_rows, RaySupport support, Matrix matrix,
                                       bool row_normalized)
    : target_cols_(target_cols), target_rows_(target_rows), support_(std::move(support)), matrix_(std::move(matrix)),
      row_normalized_(row_normalized) {
    if (matrix_.cols() != support_.size()) throw std::invalid_argument("operator columns must match the support size");
    if (static_cast<long>(target_cols_) * target_rows_ != matrix_.rows())
        throw std::invalid_argument("target dimensions do not match operator rows");
}

ProjectionOperator ProjectionOperator::from_triples(int target_cols, int target_rows, int panel_pixels,
                                                    std::span<const ProjectionTriple> triples, bool normalize_rows) {
    const int n = target_cols * target_rows;
    std::vector<RayPair> pairs;
    pairs.reserve(triples.size());
    for (const auto& t : triples) {
        if (t.row < 0 || t.row >= n) throw std::invalid_argument("triple row out of range");
        if (!(t.weight > 0.0)) throw std::invalid_argument("triple weights must be positive");
        pairs.push_back({t.front, t.rear});
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    RaySupport support(panel_pixels, pairs);

    std::vector<Eigen::Triplet<double, int>> entries;
    entries.reserve(triples.size());
    for (const auto& t : triples) {
        const auto it = std::lower_bound(pairs.begin(), pairs.end(), RayPair{t.front, t.rear});
        entries.emplace_back(t.row, static_cast<int>(it - pairs.begin()), t.weight);
    }
    Matrix m(n, support.size());
    m.setFromTriplets(entries.begin(), entries.end());
    if (normalize_rows) {
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (Matrix::InnerIterator it(m, r); it; ++it) s += it.value();
            if (s > 0.0)
                for (Matrix::InnerIterator it(m, r); it; ++it) it.valueRef() /= s;
        }
    }
    return {target_cols, target_rows, std::move(support), std::move(m), normalize_rows};
}

std::vector<ProjectionTriple> ProjectionOperator::triples() const {
    std::vector<ProjectionTriple> out;
    out.reserve(static_cast<std::size_t>(matrix_.nonZeros()));
    for (int r = 0; r < matrix_.outerSize(); ++r) {
        for (Matrix::InnerIterator it(matrix_, r); it; ++it) {
            const RayPair& p = support_[it.col()];
            out.push_back({r, p.front, p.rear, it.value()});
        }
    }
    return out;
}

ProjectionOperator build_projection(const DisplayGeometry& geom, const DiffuserModel& model) {
    geom.validate();
    return build_projection(geom, model, TargetWindow{0, 0, geom.target_cols(), geom.target_rows()});
}

ProjectionOperator build_projection(const DisplayGeometry& geom, const DiffuserModel& model, const TargetWindow& window) {
    geom.validate();
    model.validate();
    if (window.cols < 1 || window.rows < 1 || window.col0 < 0 || window.row0 < 0 ||
        window.col0 + window.cols > geom.target_cols() || window.row0 + window.rows > geom.target_rows())
        throw std::invalid_argument("target window outside the target grid");
    const int samples = model.angular_samples > 0 ? model.angular_samples : default_angular_samples(geom, model);
    const std::vector<double> angles = angular_grid(model, samples);

    const int tc = window.cols, tr = window.rows;
    const AxisBundle bx = trace_axis(geom.panel_cols, window.col0, tc, geom, model, angles);
    const AxisBundle by = trace_axis(geom.panel_rows, window.row0, tr, geom, model, angles);
    const int nx = static_cast<int>(bx.pairs.size());
    const int ny = static_cast<int>(by.pairs.size());

    // Active support is the product of the per-axis pair sets; column = ky * nx + kx.
    std::vector<RayPair> pairs;
    pairs.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (const auto& [fy, ry] : by.pairs) {
        for (const auto& [fx, rx] : bx.pairs) pairs.push_back({fy * geom.panel_cols + fx, ry * geom.panel_cols + rx});
    }
    RaySupport support(geom.panel_pixels(), std::move(pairs));

    const int n = tc * tr;
    ProjectionOperator::Matrix m(n, support.size());
    Eigen::VectorXi nnz(n);
    for (int iy = 0; iy < tr; ++iy) {
        for (int ix = 0; ix < tc; ++ix) {
            const auto& cx = bx.cells[static_cast<std::size_t>(ix)];
            const auto& cy = by.cells[static_cast<std::size_t>(iy)];
            if (cx.empty() || cy.empty()) {
                throw std::domain_error("superpixel row " + std::to_string(iy * tc + ix) + " (x=" +
                                        std::to_string(window.col0 + ix) + ", y=" + std::to_string(window.row0 + iy) +
                                        ") receives no ray inside both panels");
            }
            nnz[iy * tc + ix] = static_cast<int>(cx.size() * cy.size());
        }
    }
    m.reserve(nnz);
    for (int iy = 0; iy < tr; ++iy) {
        const auto& cy = by.cells[static_cast<std::size_t>(iy)];
        double sy = 0.0;
        for (const auto& c : cy) sy += c.weight;
        for (int ix = 0; ix < tc; ++ix) {
            const auto& cx = bx.cells[static_cast<std::size_t>(ix)];
            double sx = 0.0;
            for (const auto& c : cx) sx += c.weight;
            const double norm = 1.0 / (sx * sy);
            const int row = iy * tc + ix;
            for (const auto& ey : cy) {
                for (const auto& ex : cx) m.insert(row, ey.pair * nx + ex.pair) = ex.weight * ey.weight * norm;
            }
        }
    }
    m.makeCompressed();
    return {tc, tr, std::move(support), std::move(m), true};
}

Plane apply_projection(const ProjectionOperator& P, const PatternSet& pat) {
    if (pat.panel_pixels() != P.panel_pixels()) throw std::invalid_argument("apply_projection: dimension mismatch");
    Plane out(P.target_rows(), P.target_cols());
    flat(out) = P.matrix() * lightfield_from_patterns(P.support(), pat);
    return out;
}

Eigen::VectorXd apply_adjoint(const ProjectionOperator& P, const Eigen::Ref<const Eigen::VectorXd>& residual) {
    if (residual.size() != P.rows()) throw std::invalid_argument("apply_adjoint: dimension mismatch");
    return P.matrix().transpose() * residual;
}

Plane render_view(const PatternSet& pat, const DisplayGeometry& geom, double nu_x, double nu_y) {
    if (pat.panel_pixels() != geom.panel_pixels()) throw std::invalid_argument("render_view: dimension mismatch");
    const double tx = std::tan(nu_x * kDegToRad), ty = std::tan(nu_y * kDegToRad);
    const double d = geom.gap_diffuser, dr = geom.gap_diffuser + geom.gap_panels;
    const double pitch = geom.panel_pitch, sub = geom.superpixel_pitch();
    const int tc = geom.target_cols(), tr = geom.target_rows();
    const double inv_k = 1.0 / pat.rank();

    auto cell = [pitch](double pos, int count) {
        const int c = static_cast<int>(std::floor(pos / pitch));
        return (c < 0 || c >= count) ? -1 : c;
    };
    Plane out = Plane::Zero(tr, tc);
    for (int iy = 0; iy < tr; ++iy) {
        const double y = (iy + 0.5) * sub;
        const int fy = cell(y - d * ty, geom.panel_rows), ry = cell(y - dr * ty, geom.panel_rows);
        if (fy < 0 || ry < 0) continue;
        for (int ix = 0; ix < tc; ++ix) {
            const double x = (ix + 0.5) * sub;
            const int fx = cell(x - d * tx, geom.panel_cols), rx = cell(x - dr * tx, geom.panel_cols);
            if (fx < 0 || rx < 0) continue;
            out(iy, ix) = inv_k * pat.front.row(fy * geom.panel_cols + fx).dot(pat.rear.row(ry * geom.panel_cols + rx));
        }
    }
    return out;
}

Plane box_downsample(const Plane& target, const DisplayGeometry& geom) {
    if (target.cols() != geom.target_cols() || target.rows() != geom.target_rows())
        throw std::invalid_argument("box_downsample: target size does not match geometry");
    const Eigen::MatrixXd dx = box_overlap(geom.panel_cols, geom.target_cols(), geom.sr_factor);
    const Eigen::MatrixXd dy = box_overlap(geom.panel_rows, geom.target_rows(), geom.sr_factor);
    return dy * target * dx.transpose();
}

Plane replicate_upsample(const Plane& panel, const DisplayGeometry& geom) {
    if (panel.cols() != geom.panel_cols || panel.rows() != geom.panel_rows)
        throw std::invalid_argument("replicate_upsample: panel size does not match geometry");
    const double s = geom.sr_factor;
    const Eigen::MatrixXd dx = box_overlap(geom.panel_cols, geom.target_cols(), s);
    const Eigen::MatrixXd dy = box_overlap(geom.panel_rows, geom.target_rows(), s);
    return (s * dy.transpose()) * panel * (s * dx);
}

Plane simulate_native(const Plane& target, const DisplayGeometry& geom) {
    return replicate_upsample(box_downsample(target, geom), geom);
}

void write_operator(std::ostream& os, const ProjectionOperator& P) {
    static_assert(std::endian::native == std::endian::little, "operator files are little endian");
    const auto triples = P.triples();
    const std::uint64_t header[3] = {static_cast<std::uint64_t>(P.rows()), static_cast<std::uint64_t>(P.panel_pixels()),
                                     static_cast<std::uint64_t>(triples.size())};
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (const auto& t : triples) {
        const std::int32_t idx[3] = {t.row, t.front, t.rear};
        os.write(reinterpret_cast<const char*>(idx), sizeof(idx));
        os.write(reinterpret_cast<const char*>(&t.weight), sizeof(double));
    }
    if (!os) throw IoError("failed to write projection operator");
}

ProjectionOperator read_operator(std::istream& is, int target_cols) {
    std::uint64_t header[3] = {};
    if (!is.read(reinterpret_cast<char*>(header), sizeof(header))) throw IoError("truncated operator header");
    const auto n = static_cast<int>(header[0]);
    const auto m = static_cast<int>(header[1]);
    if (target_cols <= 0 || n % target_cols != 0) throw IoError("operator row count is not a multiple of target_cols");
    std::vector<ProjectionTriple> triples(header[2]);
    for (auto& t : triples) {
        std::int32_t idx[3] = {};
        if (!is.read(reinterpret_cast<char*>(idx), sizeof(idx)) ||
            !is.read(reinterpret_cast<char*>(&t.weight), sizeof(double)))
            throw IoError("truncated operator records");
        t.row = idx[0];
        t.front = idx[1];
        t.rear = idx[2];
    }
    auto P = ProjectionOperator::from_triples(target_cols, n / target_cols, m, triples, false);
    bool normalized = true;
    for (int r = 0; r < P.rows() && normalized; ++r) normalized = std::abs(P.matrix().row(r).sum() - 1.0) < 1e-9;
    return {P.target_cols(), P.target_rows(), P.support(), P.matrix(), normalized};
}

} // namespace sres
