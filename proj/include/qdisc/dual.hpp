#pragma once

// Dual-feasible operator built from any POVM:
//   Y0 = [sum_m z_m Pi_m z_m]^{1/2},
//   t_m = max { t : Y0 >= t z_m },
//   Y  = Y0 + sum_m (1 - t_m)^+ z_m.
// Y >= z_m for every m, so Tr Y - lambda.b bounds the constrained optimum from
// above, with equality at an optimum of the relaxed problem.

#include <limits>
#include <vector>

#include "qdisc/linalg.hpp"
#include "qdisc/problem.hpp"

namespace qdisc {

struct DualOperator {
    HermitianMatrix y;
    std::vector<double> t; // +inf for a zero weight

    double trace() const { return y.trace(); }
};

/// sum_m w_m Pi_m w_m.
inline HermitianMatrix aggregate(const std::vector<HermitianMatrix>& weights, const Povm& povm) {
    if (weights.size() != povm.size()) {
        throw Error(ErrorKind::DimensionMismatch, "weights and POVM differ in outcome count");
    }
    const Index n = weights.front().dim();
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t m = 0; m < weights.size(); ++m) {
        if (povm[m].dim() != n || weights[m].dim() != n) {
            throw Error(ErrorKind::DimensionMismatch, "operator dimensions differ");
        }
        sum.noalias() += weights[m].mat() * povm[m].mat() * weights[m].mat();
    }
    return HermitianMatrix::symmetrized(sum);
}

/// Builds the dual operator from the spectrum of the aggregate Y0^2. `factors`
/// holds q_m with z_m = q_m q_m^dagger; an empty list means "factor each z_m
/// here". Weights of rank below N use the small r x r eigenproblem.
inline DualOperator dual_operator(const Spectrum& aggregate_spectrum,
                                  const std::vector<HermitianMatrix>& z,
                                  const std::vector<Matrix>& factors = {}) {
    const Spectrum& s = aggregate_spectrum;
    require_psd(s, "aggregate");
    const Index n = s.dim();
    const HermitianMatrix y0 = sqrt_psd(s);
    const bool definite = s.min() > tol::psd * s.max();

    DualOperator out{y0, std::vector<double>(z.size(), std::numeric_limits<double>::infinity())};

    HermitianMatrix y0_inv;
    HermitianMatrix y0_inv_half;
    HermitianMatrix outside; // projector onto ker Y0, singular case only
    if (definite) {
        y0_inv = spectral_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
    } else {
        const double cut = s.rank_threshold();
        y0_inv = spectral_apply(s, [cut](double x) { return x > cut ? 1.0 / std::sqrt(x) : 0.0; });
        outside = spectral_apply(s, [cut](double x) { return x > cut ? 0.0 : 1.0; });
    }

    for (std::size_t m = 0; m < z.size(); ++m) {
        const Matrix q = factors.empty() ? psd_factor(z[m]) : factors[m];
        if (q.cols() == 0 || q.norm() == 0.0) {
            continue; // z_m = 0: any t works, (1 - t)^+ = 0
        }
        if (!definite && (outside.mat() * q).norm() > 1e-9 * q.norm()) {
            out.t[m] = 0.0; // supp z_m not inside supp Y0: only t <= 0 is admissible
            continue;
        }
        double mu = 0.0;
        if (q.cols() < n) {
            mu = max_eigenvalue_lowrank(q, y0_inv);
        } else {
            if (y0_inv_half.dim() == 0) {
                y0_inv_half = spectral_apply(s, [cut = s.rank_threshold()](double x) {
                    return x > cut ? std::pow(x, -0.25) : 0.0;
                });
            }
            mu = max_eigenvalue(sandwich(y0_inv_half, z[m]));
        }
        out.t[m] = mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
    }

    Matrix y = y0.mat();
    for (std::size_t m = 0; m < z.size(); ++m) {
        const double w = 1.0 - out.t[m];
        if (w > 0.0) {
            y += w * z[m].mat();
        }
    }
    out.y = HermitianMatrix::symmetrized(y);
    return out;
}

/// From-scratch route: fresh aggregate, fresh eigendecomposition, fresh factors.
inline DualOperator dual_operator(const std::vector<HermitianMatrix>& z, const Povm& povm) {
    return dual_operator(eig(aggregate(z, povm)), z);
}

/// Most negative eigenvalue of X - z_m over all m (>= 0 means dual feasible).
inline double dual_violation(const HermitianMatrix& x, const std::vector<HermitianMatrix>& z) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& zm : z) {
        worst = std::min(worst, min_eigenvalue(x - zm));
    }
    return worst;
}

} // namespace qdisc
