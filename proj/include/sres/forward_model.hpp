#pragma once

#include "sres/core.hpp"

#include <Eigen/SparseCore>

#include <iosfwd>
#include <span>
#include <vector>

namespace sres {

/// A ray through the panel stack, identified by the front and rear pixel it crosses.
struct RayPair {
    int front = 0;
    int rear = 0;

    friend bool operator==(const RayPair&, const RayPair&) = default;
    friend auto operator<=>(const RayPair&, const RayPair&) = default;
};

/// Active entries of the M x M light-field matrix, indexed 0..size()-1, with
/// adjacency lists from each front pixel and each rear pixel to its entries.
class RaySupport {
public:
    RaySupport() = default;
    RaySupport(int panel_pixels, std::vector<RayPair> pairs);

    int panel_pixels() const { return panel_pixels_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    const std::vector<RayPair>& pairs() const { return pairs_; }
    const RayPair& operator[](int i) const { return pairs_[static_cast<std::size_t>(i)]; }

    std::span<const int> entries_of_front(int a) const;
    std::span<const int> entries_of_rear(int b) const;

private:
    int panel_pixels_ = 0;
    std::vector<RayPair> pairs_;
    std::vector<int> front_ptr_, front_idx_;
    std::vector<int> rear_ptr_, rear_idx_;
};

/// (1/K) sum_k F[a,k] G[b,k] on every active entry (a, b).
Eigen::VectorXd lightfield_from_patterns(const RaySupport& support, const PatternSet& pat);

struct ProjectionTriple {
    int row = 0;
    int front = 0;
    int rear = 0;
    double weight = 0.0;
};

/// Sparse map P from the active light-field entries to superresolved pixels.
/// Columns of matrix() index support() entries; rows are target pixels in row-major order.
class ProjectionOperator {
public:
    using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

    ProjectionOperator() = default;
    ProjectionOperator(int target_cols, int target_rows, RaySupport support, Matrix matrix, bool row_normalized);

    /// Assembles an operator from explicit triples; duplicates (row, a, b) are summed.
    static ProjectionOperator from_triples(int target_cols, int target_rows, int panel_pixels,
                                           std::span<const ProjectionTriple> triples, bool normalize_rows);

    int rows() const { return static_cast<int>(matrix_.rows()); }
    int target_cols() const { return target_cols_; }
    int target_rows() const { return target_rows_; }
    int panel_pixels() const { return support_.panel_pixels(); }
    int active_size() const { return support_.size(); }
    bool row_normalized() const { return row_normalized_; }

    const Matrix& matrix() const { return matrix_; }
    const RaySupport& support() const { return support_; }

    /// Row-sorted (row, front, rear, weight) records.
    std::vector<ProjectionTriple> triples() const;

private:
    int target_cols_ = 0;
    int target_rows_ = 0;
    RaySupport support_;
    Matrix matrix_;
    bool row_normalized_ = false;
};

/// Traces the diffuser's angular ray bundle from every superpixel centre through both
/// panels, bins the intersections to pixel cells, merges coincident pairs and
/// normalizes each row to unit sum. Rays leaving either panel are dropped.
ProjectionOperator build_projection(const DisplayGeometry& geom, const DiffuserModel& model);

/// Rectangle of the target grid, in target pixels.
struct TargetWindow {
    int col0 = 0;
    int row0 = 0;
    int cols = 0;
    int rows = 0;
};

/// Operator restricted to the superpixels inside `window`; its support holds only the
/// rays those superpixels see.
ProjectionOperator build_projection(const DisplayGeometry& geom, const DiffuserModel& model, const TargetWindow& window);

/// Perceived superresolved image P vec((1/K) F G^T), unclamped.
Plane apply_projection(const ProjectionOperator& P, const PatternSet& pat);

/// P^T r on the active support.
Eigen::VectorXd apply_adjoint(const ProjectionOperator& P, const Eigen::Ref<const Eigen::VectorXd>& residual);

/// Samples the light field emitted by the panel pair toward direction (nu_x, nu_y) (degrees)
/// on the target grid. Rays missing either panel are black.
Plane render_view(const PatternSet& pat, const DisplayGeometry& geom, double nu_x, double nu_y);

/// Area-weighted box filter from the target grid to the panel grid.
Plane box_downsample(const Plane& target, const DisplayGeometry& geom);
/// Area-weighted replication from the panel grid back to the target grid.
Plane replicate_upsample(const Plane& panel, const DisplayGeometry& geom);

/// What a single panel at native resolution shows for this target.
Plane simulate_native(const Plane& target, const DisplayGeometry& geom);

/// Binary triple list, little endian:
///   u64 N, u64 M, u64 count, then count records of (i32 row, i32 front, i32 rear, f64 weight), row-sorted.
void write_operator(std::ostream& os, const ProjectionOperator& P);
ProjectionOperator read_operator(std::istream& is, int target_cols);

} // namespace sres
