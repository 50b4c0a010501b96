#include "sres/solver.hpp"

#include "sres/errors.hpp"
#include "sres/metrics.hpp"

#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sres {
namespace {

void clip(Eigen::MatrixXd& m, double lower) { m = m.cwiseMax(lower).cwiseMin(1.0); }

// One coordinate-exact pass over the columns of `own` (the side being updated).
// `entries_of` lists the support entries touching a pixel on the updated side and
// `other_of` maps an entry to the pixel on the fixed side.
template <typename EntriesOf, typename OtherOf>
void hals_side(const WeightedLightField& t, Eigen::MatrixXd& own, const Eigen::MatrixXd& other, Eigen::VectorXd& resid,
               double lower, EntriesOf entries_of, OtherOf other_of) {
    const int rank = static_cast<int>(own.cols());
    const double inv_k = 1.0 / rank;
    for (int k = 0; k < rank; ++k) {
        for (int p = 0; p < own.rows(); ++p) {
            double num = 0.0, den = 0.0;
            const double cur = own(p, k);
            for (int e : entries_of(p)) {
                const double w = t.weights[e];
                if (w == 0.0) continue;
                const double o = other(other_of(e), k);
                num += w * (resid[e] + cur * o * inv_k) * o;
                den += w * o * o;
            }
            if (den <= 0.0) continue;
            const double next = std::clamp(rank * num / den, lower, 1.0);
            const double delta = (next - cur) * inv_k;
            if (delta == 0.0) continue;
            own(p, k) = next;
            for (int e : entries_of(p)) resid[e] -= delta * other(other_of(e), k);
        }
    }
}

template <typename EntriesOf, typename OtherOf>
void multiplicative_side(const WeightedLightField& t, Eigen::MatrixXd& own, const Eigen::MatrixXd& other,
                         const Eigen::VectorXd& model, double lower, EntriesOf entries_of, OtherOf other_of) {
    const int rank = static_cast<int>(own.cols());
    Eigen::MatrixXd next = own;
    for (int p = 0; p < own.rows(); ++p) {
        for (int k = 0; k < rank; ++k) {
            double num = 0.0, den = 0.0;
            for (int e : entries_of(p)) {
                const double w = t.weights[e];
                const double o = other(other_of(e), k);
                num += w * t.values[e] * o;
                den += w * model[e] * o;
            }
            if (den > 0.0) next(p, k) = own(p, k) * num / den;
        }
    }
    clip(next, lower);
    own = std::move(next);
}

struct SartPreconditioner {
    Eigen::VectorXd inv_row_sum;  // 1 / r_i, 0 for empty rows
    Eigen::VectorXd col_sum;      // c_j
};

SartPreconditioner make_preconditioner(const ProjectionOperator& P) {
    SartPreconditioner pc;
    pc.inv_row_sum = Eigen::VectorXd::Zero(P.rows());
    for (int r = 0; r < P.rows(); ++r) {
        const double s = P.matrix().row(r).sum();
        if (s > 0.0) pc.inv_row_sum[r] = 1.0 / s;
    }
    pc.col_sum = P.matrix().transpose() * Eigen::VectorXd::Ones(P.rows());
    return pc;
}

// Relaxed SART on [I; rho P] L = [Q; rho y], rows weighted by inverse row sums and
// columns by inverse column sums, followed by projection onto L >= 0.
void sart_sweeps(Eigen::VectorXd& L, const Eigen::VectorXd& model, const Eigen::VectorXd& y, double rho,
                 const ProjectionOperator& P, const SartPreconditioner& pc, int sweeps, double relaxation) {
    const Eigen::VectorXd step = (relaxation / (1.0 + rho * pc.col_sum.array())).matrix();
    for (int s = 0; s < sweeps; ++s) {
        const Eigen::VectorXd r = ((y - P.matrix() * L).array() * pc.inv_row_sum.array()).matrix();
        const Eigen::VectorXd back = P.matrix().transpose() * r;
        L = (L.array() + step.array() * ((model - L).array() + rho * back.array())).cwiseMax(0.0).matrix();
    }
}

double image_error(const ProjectionOperator& P, const PatternSet& pat, const Eigen::VectorXd& i) {
    return 0.5 * (P.matrix() * lightfield_from_patterns(P.support(), pat) - i).squaredNorm();
}

// Gradients of 0.5 ||P vec((1/K) F G^T) - i||^2 with respect to F and G.
void image_gradient(const ProjectionOperator& P, const PatternSet& pat, const Eigen::VectorXd& i, Eigen::MatrixXd& gf,
                    Eigen::MatrixXd& gg) {
    const Eigen::VectorXd q = P.matrix().transpose() * (P.matrix() * lightfield_from_patterns(P.support(), pat) - i);
    const double inv_k = 1.0 / pat.rank();
    gf = Eigen::MatrixXd::Zero(pat.front.rows(), pat.rank());
    gg = Eigen::MatrixXd::Zero(pat.rear.rows(), pat.rank());
    const RaySupport& s = P.support();
    for (int e = 0; e < s.size(); ++e) {
        const RayPair& r = s[e];
        gf.row(r.front) += (q[e] * inv_k) * pat.rear.row(r.rear);
        gg.row(r.rear) += (q[e] * inv_k) * pat.front.row(r.front);
    }
}

// Accelerated projected gradient with backtracking and monotone restarts; never returns
// a worse point than it starts from.
void polish(const ProjectionOperator& P, const Eigen::VectorXd& i, PatternSet& best, int iters,
            std::vector<IterationRecord>& history, int first_iter, const Plane& target) {
    const double lower = best.lower_bound;
    PatternSet x = best, y = best;
    double fx = image_error(P, x, i), step = 1.0, t = 1.0;
    Eigen::MatrixXd gf, gg;
    for (int it = 0; it < iters;) {
        image_gradient(P, y, i, gf, gg);
        const double fy = image_error(P, y, i);
        PatternSet next = y;
        double fn = 0.0;
        for (int tries = 0; tries < 60; ++tries) {
            next.front = y.front - step * gf;
            next.rear = y.rear - step * gg;
            clip(next.front, lower);
            clip(next.rear, lower);
            const Eigen::MatrixXd df = next.front - y.front, dg = next.rear - y.rear;
            fn = image_error(P, next, i);
            const double bound = fy + gf.cwiseProduct(df).sum() + gg.cwiseProduct(dg).sum() +
                                 (df.squaredNorm() + dg.squaredNorm()) / (2.0 * step);
            if (fn <= bound * (1.0 + 1e-12)) break;
            step *= 0.5;
        }
        if (fn > fx) {
            if (t == 1.0) break;  // no descent even without momentum
            t = 1.0;              // momentum overshot: restart from the last accepted point
            y = x;
            continue;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next;
        y.front += ((t - 1.0) / tn) * (next.front - x.front);
        y.rear += ((t - 1.0) / tn) * (next.rear - x.rear);
        clip(y.front, lower);
        clip(y.rear, lower);
        x = std::move(next);
        fx = fn;
        t = tn;
        step *= 1.25;

        if (!x.front.allFinite() || !x.rear.allFinite()) throw SolverDiverged(first_iter + it, "non-finite polish iterate");
        IterationRecord rec;
        rec.iter = first_iter + it;
        rec.primal_residual = std::sqrt(2.0 * fx);
        Plane shown(target.rows(), target.cols());
        flat(shown) = P.matrix() * lightfield_from_patterns(P.support(), x);
        rec.psnr = psnr(shown, target);
        history.push_back(rec);
        ++it;
    }
    best = std::move(x);
}

void check_target(const Plane& target, const ProjectionOperator& P) {
    if (target.rows() != P.target_rows() || target.cols() != P.target_cols())
        throw std::invalid_argument("target size does not match the projection operator");
    if (!target.allFinite()) throw std::invalid_argument("target contains non-finite values");
}

} // namespace

WeightedLightField WeightedLightField::uniform(RaySupport support, Eigen::VectorXd values) {
    WeightedLightField t{std::move(support), std::move(values), {}};
    t.weights = Eigen::VectorXd::Ones(t.values.size());
    return t;
}

double factorization_objective(const WeightedLightField& target, const PatternSet& pat) {
    const Eigen::VectorXd q = lightfield_from_patterns(target.support, pat);
    return (target.weights.array() * (q - target.values).array().square()).sum();
}

PatternSet initial_patterns(int panel_pixels, int rank, double lower, std::uint64_t seed) {
    detail::Rng rng(seed);
    PatternSet pat;
    pat.lower_bound = lower;
    pat.front.resize(panel_pixels, rank);
    pat.rear.resize(panel_pixels, rank);
    for (int k = 0; k < rank; ++k)
        for (int p = 0; p < panel_pixels; ++p) pat.front(p, k) = rng.uniform(0.2, 0.8);
    for (int k = 0; k < rank; ++k)
        for (int p = 0; p < panel_pixels; ++p) pat.rear(p, k) = rng.uniform(0.2, 0.8);
    clip(pat.front, lower);
    clip(pat.rear, lower);
    return pat;
}

void refine_factorization(const WeightedLightField& t, PatternSet& pat, int alternations, FactorUpdate rule) {
    const RaySupport& s = t.support;
    auto front_entries = [&s](int a) { return s.entries_of_front(a); };
    auto rear_entries = [&s](int b) { return s.entries_of_rear(b); };
    auto rear_of = [&s](int e) { return s[e].rear; };
    auto front_of = [&s](int e) { return s[e].front; };
    const double lower = pat.lower_bound;

    for (int it = 0; it < alternations; ++it) {
        if (rule == FactorUpdate::Hals) {
            Eigen::VectorXd resid = t.values - lightfield_from_patterns(s, pat);
            hals_side(t, pat.front, pat.rear, resid, lower, front_entries, rear_of);
            hals_side(t, pat.rear, pat.front, resid, lower, rear_entries, front_of);
        } else {
            multiplicative_side(t, pat.front, pat.rear, lightfield_from_patterns(s, pat), lower, front_entries, rear_of);
            multiplicative_side(t, pat.rear, pat.front, lightfield_from_patterns(s, pat), lower, rear_entries, front_of);
        }
    }
}

FactorizationResult factorize_box(const WeightedLightField& target, int rank, double lower, const SolverConfig& cfg) {
    cfg.validate();
    const int m = target.support.panel_pixels();
    if (rank < 1) throw std::invalid_argument("rank must be >= 1");
    if (rank > m) throw std::invalid_argument("rank exceeds the number of panel pixels");
    if (!(lower >= 0.0 && lower < 1.0)) throw std::invalid_argument("lower bound must lie in [0, 1)");
    if (target.values.size() != target.support.size() || target.weights.size() != target.support.size())
        throw std::invalid_argument("light-field values/weights do not match the support");
    if ((target.values.array() < 0.0).any() || (target.weights.array() < 0.0).any())
        throw std::invalid_argument("light-field values and weights must be nonnegative");

    FactorizationResult res;
    res.patterns = initial_patterns(m, rank, lower, cfg.seed);
    res.objective.reserve(static_cast<std::size_t>(cfg.fact_iters));
    for (int it = 0; it < cfg.fact_iters; ++it) {
        refine_factorization(target, res.patterns, 1, cfg.update);
        res.objective.push_back(factorization_objective(target, res.patterns));
    }
    return res;
}

double lightfield_objective(const LightFieldState& state, const PatternSet& pat, const ProjectionOperator& P,
                            const Plane& target) {
    const Eigen::VectorXd q = lightfield_from_patterns(P.support(), pat);
    const Eigen::VectorXd r = P.matrix() * state.values - flat(target) + state.dual;
    return (q - state.values).squaredNorm() + state.rho * r.squaredNorm();
}

LightFieldState solve_lightfield_subproblem(LightFieldState state, const PatternSet& pat, const ProjectionOperator& P,
                                            const Plane& target, const SolverConfig& cfg) {
    if (!(state.rho > 0.0)) throw std::invalid_argument("rho must be > 0");
    check_target(target, P);
    if (state.values.size() != P.active_size() || state.dual.size() != P.rows())
        throw std::invalid_argument("light-field state does not match the projection operator");
    const Eigen::VectorXd q = lightfield_from_patterns(P.support(), pat);
    const Eigen::VectorXd y = flat(target) - state.dual;
    sart_sweeps(state.values, q, y, state.rho, P, make_preconditioner(P), cfg.sart_iters, cfg.relaxation);
    return state;
}

SuperresResult decompose_superres(const Plane& target, const ProjectionOperator& P, int rank, const SolverConfig& cfg,
                                  double lower_bound) {
    cfg.validate();
    check_target(target, P);
    if (rank < 1) throw std::invalid_argument("rank must be >= 1");
    if (rank > P.panel_pixels()) throw std::invalid_argument("rank exceeds the number of panel pixels");

    const auto i = flat(target);
    const double target_norm = std::max(i.norm(), 1e-300);
    const SartPreconditioner pc = make_preconditioner(P);

    SuperresResult res;
    res.unreachable_pixels = static_cast<int>((i.array() < lower_bound * lower_bound).count());

    PatternSet pat = initial_patterns(P.panel_pixels(), rank, lower_bound, cfg.seed);
    WeightedLightField split =
        WeightedLightField::uniform(P.support(), lightfield_from_patterns(P.support(), pat));
    Eigen::VectorXd model = split.values;
    Eigen::VectorXd dual = Eigen::VectorXd::Zero(P.rows());

    double best_err = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg.outer_iters; ++it) {
        sart_sweeps(split.values, model, i - dual, cfg.rho, P, pc, cfg.sart_iters, cfg.relaxation);
        refine_factorization(split, pat, cfg.fact_iters, cfg.update);
        model = lightfield_from_patterns(P.support(), pat);
        const Eigen::VectorXd primal = P.matrix() * split.values - i;
        dual += primal;

        if (!split.values.allFinite() || !dual.allFinite() || !pat.front.allFinite() || !pat.rear.allFinite())
            throw SolverDiverged(it, "non-finite iterate in superresolution solver");

        IterationRecord rec;
        rec.iter = it;
        rec.primal_residual = primal.norm();
        rec.fact_error = (model - split.values).norm();
        Plane shown(target.rows(), target.cols());
        flat(shown) = P.matrix() * model;
        rec.psnr = psnr(shown, target);
        res.history.push_back(rec);

        const double err = (flat(shown) - i).squaredNorm();
        if (err < best_err) {
            best_err = err;
            res.patterns = pat;
            res.best_iteration = it;
        }
        if (rec.primal_residual < cfg.tol_primal * target_norm && rec.fact_error < cfg.tol_primal * target_norm) {
            res.converged = true;
            break;
        }
    }
    if (cfg.polish_iters > 0) {
        const int first = static_cast<int>(res.history.size()) + 1;
        polish(P, Eigen::VectorXd(i), res.patterns, cfg.polish_iters, res.history, first, target);
        if (static_cast<int>(res.history.size()) >= first) res.best_iteration = static_cast<int>(res.history.size());
    }
    return res;
}

} // namespace sres
