#pragma once

#include "sres/core.hpp"
#include "sres/forward_model.hpp"

#include <vector>

namespace sres {

/// Target for the box-constrained factorization: a light field given on a sparse
/// support, with a nonnegative weight per entry (0 = don't care).
struct WeightedLightField {
    RaySupport support;
    Eigen::VectorXd values;
    Eigen::VectorXd weights;

    /// Unit weights on every entry.
    static WeightedLightField uniform(RaySupport support, Eigen::VectorXd values);
};

/// sum_e w_e ((1/K) F[a_e] . G[b_e] - L_e)^2
double factorization_objective(const WeightedLightField& target, const PatternSet& pat);

/// Frames drawn uniformly from [0.2, 0.8] (then clipped to [lower, 1]) with a portable generator.
PatternSet initial_patterns(int panel_pixels, int rank, double lower, std::uint64_t seed);

/// Runs `alternations` F-then-G updates in place; each update is clipped to [lower_bound, 1]
/// and never increases factorization_objective().
void refine_factorization(const WeightedLightField& target, PatternSet& pat, int alternations, FactorUpdate rule);

struct FactorizationResult {
    PatternSet patterns;
    std::vector<double> objective;  // after each alternation
};

/// Rank-K factorization with lower <= F, G <= 1 from a seeded start, cfg.fact_iters alternations.
FactorizationResult factorize_box(const WeightedLightField& target, int rank, double lower, const SolverConfig& cfg);

/// Splitting variable L (on the operator's active support) and scaled dual u.
struct LightFieldState {
    Eigen::VectorXd values;
    Eigen::VectorXd dual;
    double rho = 1.0;
};

/// ||(1/K) F G^T - L||^2 + rho ||P L - i + u||^2
double lightfield_objective(const LightFieldState& state, const PatternSet& pat, const ProjectionOperator& P,
                            const Plane& target);

/// cfg.sart_iters relaxed SART sweeps on the stacked system {L = (1/K) F G^T; rho P L = rho (i - u)},
/// each followed by projection onto L >= 0.
LightFieldState solve_lightfield_subproblem(LightFieldState state, const PatternSet& pat, const ProjectionOperator& P,
                                            const Plane& target, const SolverConfig& cfg);

struct IterationRecord {
    int iter = 0;
    double primal_residual = 0.0;  // ||P L - i||
    double fact_error = 0.0;       // ||(1/K) F G^T - L||
    double psnr = 0.0;             // perceived image vs target, dB
};

struct SuperresResult {
    PatternSet patterns;
    std::vector<IterationRecord> history;
    int best_iteration = 0;  // iteration whose patterns are returned (polish steps continue the count)
    bool converged = false;
    /// Target pixels darker than lower_bound^2 cannot be reproduced.
    int unreachable_pixels = 0;
};

/// ADMM decomposition of a superresolved target into K bounded pattern pairs.
/// Returns the iterate with the lowest image-space error, refined by cfg.polish_iters
/// projected-gradient steps on ||P vec((1/K) F G^T) - i||^2 (L = (1/K) F G^T during those steps).
SuperresResult decompose_superres(const Plane& target, const ProjectionOperator& P, int rank, const SolverConfig& cfg,
                                  double lower_bound = 0.0);

} // namespace sres
