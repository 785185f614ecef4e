#pragma once

// Independent checks: dual certificates recomputed from scratch, the two-state
// closed form, an exhaustive oracle for qubit problems with one constraint, and
// the conjugate relation between the constrained optimum fo(b) and
// go(lambda) = max_Pi sum_m Tr[z_m(lambda) Pi_m].

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qdisc/gsolver.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/minerr.hpp"
#include "qdisc/modified.hpp"
#include "qdisc/problem.hpp"

namespace qdisc {

struct Certificate {
    HermitianMatrix x;
    Multipliers lambda;
    double value = 0.0;         // Tr X - lambda.b
    double max_violation = 0.0; // min_m min-eig(X - z_m(lambda)); >= 0 when feasible

    bool accepted(double slack = 10.0 * tol::psd) const { return max_violation >= -slack; }
};

inline Certificate check_dual_feasible(const DiscriminationProblem& p, const HermitianMatrix& x,
                                       const std::vector<double>& lambda) {
    if (x.dim() != p.dim) {
        throw Error(ErrorKind::DimensionMismatch, "X has dim " + std::to_string(x.dim()) +
                                                      ", problem has " + std::to_string(p.dim));
    }
    const auto z = z_operators(p, lambda);
    Certificate c{x, Multipliers{lambda}, 0.0, 0.0};
    c.value = x.trace() - c.lambda.dot(p.b);
    c.max_violation = dual_violation(x, z);
    return c;
}

/// Certificate from the dual operator of `povm` at `lambda`, built from scratch.
inline Certificate auto_dual(const DiscriminationProblem& p, const Povm& povm,
                             const std::vector<double>& lambda) {
    detail::check_povm_shape(p, povm);
    const DualOperator dual = dual_operator(z_operators(p, lambda), povm);
    return check_dual_feasible(p, dual.y, lambda);
}

/// (1 + || xi0 rho0 - xi1 rho1 ||_1) / 2.
inline double helstrom_value(double xi0, const HermitianMatrix& rho0, double xi1,
                             const HermitianMatrix& rho1) {
    if (rho0.dim() != rho1.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "states differ in dimension");
    }
    const Spectrum s = eig(xi0 * rho0 - xi1 * rho1);
    return 0.5 * (1.0 + s.values.cwiseAbs().sum());
}

/// Optimality transfer at a solution: each row is feasible and either tight
/// or carries a negligible multiplier.
struct SlacknessRow {
    double beta = 0.0;
    double b = 0.0;
    double lambda = 0.0;
    bool feasible = false;
    bool complementary = false;
};

inline std::vector<SlacknessRow> complementary_slackness(const DiscriminationProblem& p, const Povm& povm,
                                                         const std::vector<double>& lambda,
                                                         double lambda_floor = 1e-12,
                                                         double slack_tol = 1e-6) {
    check_multipliers(p, lambda);
    const auto beta = beta_all(p, povm);
    std::vector<SlacknessRow> out;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        SlacknessRow r{beta[j], p.b[j], lambda[j], beta[j] >= p.b[j] - 1e-8, false};
        r.complementary = lambda[j] <= 10.0 * lambda_floor || std::abs(lambda[j] * (beta[j] - p.b[j])) < slack_tol;
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Qubit oracle

struct QubitOracle {
    double value = 0.0;
    double theta = 0.0, phi = 0.0; // Bloch direction n of the eigenbasis of Pi_0
    double s = 0.0, t = 0.0;       // Pi_0 = s |n><n| + t |-n><-n|
};

namespace detail {

/// <n|A|n> for the Bloch unit vector n, A a 2 x 2 Hermitian matrix.
inline double bloch_expectation(const HermitianMatrix& a, double nx, double ny, double nz) {
    const double tr = a(0, 0).real() + a(1, 1).real();
    const double x = 2.0 * a(0, 1).real();
    const double y = -2.0 * a(0, 1).imag();
    const double z = a(0, 0).real() - a(1, 1).real();
    return 0.5 * (tr + nx * x + ny * y + nz * z);
}

} // namespace detail

/// Grid over the eigenbasis of Pi_0 (theta in [0, pi], phi in [0, 2 pi)) with
/// `resolution` and 2 * `resolution` steps. For a fixed basis, f and beta_0 are
/// affine in the two eigenvalues (s, t) in [0, 1]^2, so the inner problem is a
/// two-variable linear program solved exactly on the vertices of the feasible
/// polygon. Every two-outcome qubit POVM has this form.
inline QubitOracle brute_force_qubit_j1(const DiscriminationProblem& p, std::size_t resolution) {
    if (p.dim != 2 || p.num_outcomes() != 2 || p.num_constraints() != 1) {
        throw Error(ErrorKind::InvalidArgument, "oracle needs N = 2, M = 2, J = 1");
    }
    if (resolution < 1) {
        throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
    }
    const HermitianMatrix dc = p.c[0] - p.c[1];
    const HermitianMatrix da = p.a[0][0] - p.a[0][1];
    const double f_base = p.c[1].trace();
    const double beta_base = p.a[0][1].trace();
    const double b0 = p.b[0];

    QubitOracle best;
    bool found = false;
    const std::size_t n_theta = resolution;
    const std::size_t n_phi = 2 * resolution;
    for (std::size_t i = 0; i <= n_theta; ++i) {
        const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_theta);
        for (std::size_t k = 0; k < n_phi; ++k) {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_phi);
            const double nx = std::sin(theta) * std::cos(phi);
            const double ny = std::sin(theta) * std::sin(phi);
            const double nz = std::cos(theta);
            const double fs = detail::bloch_expectation(dc, nx, ny, nz);
            const double ft = detail::bloch_expectation(dc, -nx, -ny, -nz);
            const double gs = detail::bloch_expectation(da, nx, ny, nz);
            const double gt = detail::bloch_expectation(da, -nx, -ny, -nz);
            const double need = b0 - beta_base; // gs s + gt t >= need

            double cand[8][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
            int nc = 4;
            if (gt != 0.0) {
                cand[nc][0] = 0.0, cand[nc][1] = need / gt, ++nc;
                cand[nc][0] = 1.0, cand[nc][1] = (need - gs) / gt, ++nc;
            }
            if (gs != 0.0) {
                cand[nc][0] = need / gs, cand[nc][1] = 0.0, ++nc;
                cand[nc][0] = (need - gt) / gs, cand[nc][1] = 1.0, ++nc;
            }
            for (int c = 0; c < nc; ++c) {
                const double s = cand[c][0];
                const double t = cand[c][1];
                if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
                    continue;
                }
                if (gs * s + gt * t < need - 1e-12) {
                    continue;
                }
                const double f = f_base + fs * s + ft * t;
                if (!found || f > best.value) {
                    best = QubitOracle{f, theta, phi, s, t};
                    found = true;
                }
            }
        }
    }
    if (!found) {
        throw Error(ErrorKind::EmptyFeasibleGrid, "no grid POVM meets the constraint");
    }
    return best;
}

// ---------------------------------------------------------------------------
// Optimal-value functions

struct RelaxedValue {
    double value = 0.0; // go(lambda), primal side
    double upper = 0.0; // dual side; value <= go <= upper
    std::vector<double> beta; // beta(Pi_lambda) of the maximizer found
};

/// go(lambda). Two outcomes use the closed form
/// Tr z_1 + (sum of positive eigenvalues of z_0 - z_1), which needs no
/// iteration and is exact even where the maximizer is not unique; more
/// outcomes use the fixed point on the weights z_m(lambda).
inline RelaxedValue go_value(const DiscriminationProblem& p, const std::vector<double>& lambda,
                             double eps, std::size_t max_iter = default_max_iter) {
    const auto z = z_operators(p, lambda);
    if (z.size() == 2) {
        const Spectrum s = eig(z[0] - z[1]);
        const double cut = s.rank_threshold();
        const HermitianMatrix pi0 = spectral_apply(s, [cut](double x) { return x > cut ? 1.0 : 0.0; });
        const Povm best{{pi0, HermitianMatrix::identity(p.dim) - pi0}};
        double value = z[1].trace();
        for (Index i = 0; i < s.dim(); ++i) {
            value += std::max(s.values(i), 0.0);
        }
        return RelaxedValue{value, value, beta_all(p, best)};
    }
    const MinErrResult r = maximize_linear(z, eps, max_iter);
    if (r.status != SolveStatus::Converged) {
        throw Error(ErrorKind::NumericalFailure, "inner solve for go(lambda) hit the iteration limit");
    }
    return RelaxedValue{r.value, r.upper, beta_all(p, r.povm)};
}

/// fo(b) by the constrained solver; the report's bounds bracket it.
inline SolveReport fo_value(DiscriminationProblem p, const std::vector<double>& b, double eps,
                            std::size_t max_iter = default_max_iter) {
    if (b.size() != p.num_constraints()) {
        throw Error(ErrorKind::DimensionMismatch, "threshold vector has the wrong length");
    }
    p.b = b;
    for (auto& x : p.b) {
        x = std::max(x, 0.0);
    }
    SolverConfig cfg;
    cfg.epsilon = eps;
    cfg.max_iter = max_iter;
    SolveReport r = solve(p, cfg);
    if (r.status == SolveStatus::IterationLimit) {
        throw Error(ErrorKind::NumericalFailure, "inner solve for fo(b) hit the iteration limit");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Conjugacy check

struct LegendreRow {
    double b = 0.0;
    double fo = 0.0;        // constrained optimum
    double transform = 0.0; // max_lambda [lambda b - go(lambda)]
    double lambda_star = 0.0;
    double discrepancy = 0.0; // |fo + transform|
};

struct LegendreReport {
    std::vector<LegendreRow> rows;
    double max_discrepancy = 0.0;
};

namespace detail {

/// min over lambda >= 0 of the convex h(lambda) = go(lambda) - lambda b:
/// coarse grid, bracket around the best grid point (extended by doubling if
/// the minimum sits at the right end), then golden-section refinement.
inline std::pair<double, double> minimize_dual(const DiscriminationProblem& p, double b,
                                               const std::vector<double>& grid, double eps) {
    auto h = [&](double lam) { return go_value(p, {lam}, eps).value - lam * b; };
    std::vector<double> xs{0.0};
    xs.insert(xs.end(), grid.begin(), grid.end());
    std::vector<double> hs;
    for (double x : xs) hs.push_back(h(x));
    std::size_t best = static_cast<std::size_t>(std::min_element(hs.begin(), hs.end()) - hs.begin());

    double lo = best > 0 ? xs[best - 1] : 0.0;
    double hi = 0.0;
    if (best + 1 < xs.size()) {
        hi = xs[best + 1];
    } else {
        double x = std::max(xs.back(), 1.0);
        double hx = hs.back();
        for (int k = 0; k < 80; ++k) {
            const double y = 2.0 * x;
            const double hy = h(y);
            if (hy >= hx) {
                hi = y;
                break;
            }
            lo = x;
            x = y;
            hx = hy;
        }
        if (hi == 0.0) {
            throw Error(ErrorKind::NumericalFailure, "go(lambda) - lambda b is unbounded below");
        }
    }

    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double h1 = h(x1);
    double h2 = h(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        if (h1 <= h2) {
            hi = x2;
            x2 = x1;
            h2 = h1;
            x1 = hi - ratio * (hi - lo);
            h1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            h1 = h2;
            x2 = lo + ratio * (hi - lo);
            h2 = h(x2);
        }
    }
    double arg = h1 <= h2 ? x1 : x2;
    double val = std::min(h1, h2);
    if (hs[best] < val) {
        arg = xs[best];
        val = hs[best];
    }
    return {arg, val};
}

} // namespace detail

/// max over the b grid of |fo(b) + max_lambda [lambda b - go(lambda)]| for a
/// problem with one constraint. `lambda_grid` seeds the outer maximization.
inline LegendreReport legendre_check(const DiscriminationProblem& p, const std::vector<double>& b_grid,
                                     const std::vector<double>& lambda_grid, double inner_eps = 1e-10) {
    if (p.num_constraints() != 1) {
        throw Error(ErrorKind::InvalidArgument, "legendre_check needs J = 1");
    }
    if (b_grid.empty() || lambda_grid.empty()) {
        throw Error(ErrorKind::InvalidArgument, "grids must be nonempty");
    }
    for (double x : lambda_grid) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw Error(ErrorKind::InvalidArgument, "lambda grid must be positive and finite");
        }
    }
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());

    LegendreReport out;
    for (double b : b_grid) {
        if (!std::isfinite(b) || b < 0.0) {
            throw Error(ErrorKind::InvalidArgument, "b grid must be nonnegative and finite");
        }
        const SolveReport fo = fo_value(p, {b}, inner_eps);
        const auto [arg, hmin] = detail::minimize_dual(p, b, grid, inner_eps);
        LegendreRow row;
        row.b = b;
        row.fo = 0.5 * (fo.f_upper + fo.f_lower);
        row.transform = -hmin;
        row.lambda_star = arg;
        row.discrepancy = std::abs(row.fo + row.transform);
        out.max_discrepancy = std::max(out.max_discrepancy, row.discrepancy);
        out.rows.push_back(row);
    }
    return out;
}

} // namespace qdisc
