#include "sres/conditioning.hpp"

#include "sres/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace sres {

double condition_number(const ProjectionOperator& P) {
    const long rows = P.rows(), cols = P.active_size();
    if (rows < 1 || cols < 1) throw AnalysisError("condition number of an empty operator");
    if (rows > kConditioningMaxRows)
        throw AnalysisError("operator has " + std::to_string(rows) + " rows; conditioning tiles are limited to " +
                            std::to_string(kConditioningMaxRows));

    double smax = 0.0, smin = 0.0;
    if (rows * cols <= kDenseSvdLimit) {
        const Eigen::MatrixXd dense = P.matrix();
        const Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
        const auto& s = svd.singularValues();
        smax = s.maxCoeff();
        smin = s.minCoeff();
    } else {
        // rows <= 4096 < cols here, so all singular values live in P P^T
        const Eigen::SparseMatrix<double> gram_sparse = P.matrix() * P.matrix().transpose();
        const Eigen::MatrixXd gram = gram_sparse;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        const auto& l = eig.eigenvalues();
        smax = std::sqrt(std::max(l.maxCoeff(), 0.0));
        smin = std::sqrt(std::max(l.minCoeff(), 0.0));
    }
    if (!(smax > 0.0) || smin < 1e-12 * smax) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

ProjectionOperator conditioning_tile(const DisplayGeometry& base, const DiffuserModel& model, int tile) {
    if (tile < 1) throw std::invalid_argument("tile must be >= 1 superpixel");
    const double s = base.sr_factor;
    const double rear = diffuser_footprints(base, model).rear;
    const int margin = static_cast<int>(std::ceil(0.5 * rear / base.panel_pitch)) + 2;
    int inner = static_cast<int>(std::ceil(tile / s));
    // panel size must scale to an integer target size
    int panel = inner + 2 * margin;
    while (std::abs(panel * s - std::round(panel * s)) > 1e-9) ++panel;

    DisplayGeometry g = base;
    g.panel_cols = g.panel_rows = panel;
    g.validate();
    const int off = (g.target_cols() - tile) / 2;
    return build_projection(g, model, TargetWindow{off, off, tile, tile});
}

} // namespace sres
