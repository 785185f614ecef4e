#pragma once

// Minimum-error discrimination via the multiplicative fixed point
//   D_m = w_m Pi_m w_m,  Lambda = (sum_k D_k)^{-1/2},  Pi'_m = Lambda D_m Lambda,
// with w_m = xi_m rho_m (or any PSD weights, e.g. z_m(lambda)).

#include <cstddef>
#include <numeric>
#include <vector>

#include "qdisc/dual.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/modified.hpp"
#include "qdisc/problem.hpp"

namespace qdisc {

struct MinErrInstance {
    std::vector<HermitianMatrix> weights;

    Index dim() const { return weights.empty() ? 0 : weights.front().dim(); }
    std::size_t size() const noexcept { return weights.size(); }

    static MinErrInstance from_ensemble(const StateEnsemble& e) {
        return MinErrInstance{from_min_error(e).c};
    }
};

inline void check_instance(const MinErrInstance& inst) {
    if (inst.weights.empty()) {
        throw Error(ErrorKind::InvalidArgument, "instance has no weights");
    }
    bool any_nonzero = false;
    for (const auto& w : inst.weights) {
        if (w.dim() != inst.dim()) {
            throw Error(ErrorKind::DimensionMismatch, "weights differ in dimension");
        }
        if (!is_psd(w)) {
            throw Error(ErrorKind::NotPsd, "weight is not PSD");
        }
        any_nonzero = any_nonzero || w.frobenius() > 0.0;
    }
    if (!any_nonzero) {
        throw Error(ErrorKind::DegenerateInstance, "all weights are zero");
    }
}

/// One application of the fixed-point map. Keeps the aggregate spectrum so the
/// caller can build the dual bound for the input POVM without another
/// eigendecomposition.
struct FixedPointStep {
    Povm next;
    Spectrum aggregate;          // spectrum of sum_m w_m Pi_m w_m
    std::vector<Matrix> factors; // next[m] = factors[m] factors[m]^dagger
};

/// F_m with Pi_m = F_m F_m^dagger, from the eigendecomposition with negative
/// round-off clamped to zero.
inline std::vector<Matrix> povm_factors(const Povm& povm) {
    std::vector<Matrix> out;
    out.reserve(povm.size());
    for (const auto& e : povm.elements) {
        const Spectrum s = eig(e);
        const RealVector root = s.values.cwiseMax(0.0).cwiseSqrt();
        out.push_back(s.vectors * root.asDiagonal());
    }
    return out;
}

/// Factors of the uniform POVM I/M.
inline std::vector<Matrix> uniform_factors(Index n, std::size_t m) {
    return std::vector<Matrix>(m, Matrix::Identity(n, n) / std::sqrt(static_cast<double>(m)));
}

/// The map on factors: F'_m = Lambda w_m F_m. Every element stays PSD by
/// construction. This matters because the map is multiplicative: an element
/// eigenvalue of -1e-16 left by round-off on a direction that becomes
/// profitable would grow geometrically with the wrong sign.
inline FixedPointStep fixed_point_step(const std::vector<HermitianMatrix>& weights,
                                       const std::vector<Matrix>& factors) {
    if (weights.size() != factors.size()) {
        throw Error(ErrorKind::DimensionMismatch, "weights and POVM differ in outcome count");
    }
    const Index n = weights.front().dim();
    std::vector<Matrix> g;
    g.reserve(weights.size());
    Matrix y = Matrix::Zero(n, n);
    for (std::size_t m = 0; m < weights.size(); ++m) {
        if (weights[m].dim() != n || factors[m].rows() != n) {
            throw Error(ErrorKind::DimensionMismatch, "operator dimensions differ");
        }
        g.push_back(weights[m].mat() * factors[m]);
        y.noalias() += g.back() * g.back().adjoint();
    }
    FixedPointStep out;
    out.aggregate = eig(HermitianMatrix::symmetrized(y));
    // Relative test: the map is invariant under w -> s w, so an absolute floor
    // would reject well-posed instances with a small prior.
    if (!(out.aggregate.min() > tol::psd * out.aggregate.max())) {
        throw Error(ErrorKind::SingularAggregate,
                    "sum of D_m has eigenvalue " + std::to_string(out.aggregate.min()) +
                        "; weights do not span the space or a multiplier hit zero");
    }
    const RealVector inv_root = out.aggregate.values.array().rsqrt();
    const Matrix lambda = out.aggregate.vectors * inv_root.asDiagonal() * out.aggregate.vectors.adjoint();
    Matrix sum = Matrix::Zero(n, n);
    for (auto& gm : g) {
        gm = lambda * gm;
        sum.noalias() += gm * gm.adjoint();
    }
    // Round-off in Lambda grows with the condition number of the aggregate and
    // leaves sum_m Pi_m = I + E. Multiplying by I - E/2 removes E to first
    // order, which keeps completeness near machine precision.
    const Matrix c = 1.5 * Matrix::Identity(n, n) - 0.5 * sum;
    out.factors.reserve(g.size());
    out.next.elements.reserve(g.size());
    for (const auto& gm : g) {
        out.factors.push_back(c * gm);
        out.next.elements.push_back(HermitianMatrix::symmetrized(out.factors.back() * out.factors.back().adjoint()));
    }
    return out;
}

inline FixedPointStep fixed_point_step(const std::vector<HermitianMatrix>& weights, const Povm& povm) {
    if (weights.size() != povm.size()) {
        throw Error(ErrorKind::DimensionMismatch, "weights and POVM differ in outcome count");
    }
    return fixed_point_step(weights, povm_factors(povm));
}

inline Povm jezek_step(const MinErrInstance& inst, const Povm& povm) {
    if (povm.size() != inst.size()) {
        throw Error(ErrorKind::DimensionMismatch, "POVM and instance differ in outcome count");
    }
    return fixed_point_step(inst.weights, povm).next;
}

inline double weighted_value(const std::vector<HermitianMatrix>& weights, const Povm& povm) {
    double acc = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        acc += trace_product(weights[m], povm[m]);
    }
    return acc;
}

/// Dual gap of a POVM for a minimum-error instance: Tr Y - sum_m Tr(w_m Pi_m),
/// with Y recomputed from scratch. Nonnegative up to round-off.
inline double min_error_gap(const MinErrInstance& inst, const Povm& povm) {
    const DualOperator dual = dual_operator(inst.weights, povm);
    return dual.trace() - weighted_value(inst.weights, povm);
}

enum class SolveStatus { Converged, IterationLimit, InfeasibleSuspected };

inline const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::InfeasibleSuspected: return "InfeasibleSuspected";
    }
    return "Unknown";
}

struct MinErrResult {
    Povm povm;
    double value = 0.0; // sum_m Tr(w_m Pi_m)
    double upper = 0.0; // Tr Y of the dual operator
    double gap = 0.0;
    std::size_t iterations = 0;
    SolveStatus status = SolveStatus::IterationLimit;
};

inline constexpr std::size_t default_max_iter = 200000;

/// Iterates from the uniform POVM until the dual gap of the current iterate is
/// below eps. IterationLimit is reported in the status with the last iterate.
inline MinErrResult solve_min_error(const MinErrInstance& inst, double eps,
                                    std::size_t max_iter = default_max_iter) {
    if (!(eps > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "eps must be positive");
    }
    check_instance(inst);
    std::vector<Matrix> weight_factors;
    weight_factors.reserve(inst.size());
    for (const auto& w : inst.weights) {
        weight_factors.push_back(psd_factor(w));
    }

    MinErrResult r;
    r.povm = Povm::uniform(inst.dim(), inst.size());
    std::vector<Matrix> povm_factors = uniform_factors(inst.dim(), inst.size());
    for (std::size_t l = 0;; ++l) {
        FixedPointStep step = fixed_point_step(inst.weights, povm_factors);
        const DualOperator dual = dual_operator(step.aggregate, inst.weights, weight_factors);
        r.value = weighted_value(inst.weights, r.povm);
        r.upper = dual.trace();
        r.gap = r.upper - r.value;
        r.iterations = l;
        if (r.gap < eps) {
            r.status = SolveStatus::Converged;
            return r;
        }
        if (l == max_iter) {
            r.status = SolveStatus::IterationLimit;
            return r;
        }
        r.povm = std::move(step.next);
        povm_factors = std::move(step.factors);
    }
}

/// max over POVMs of sum_m Tr(w_m Pi_m) for PSD weights that need not span the
/// space: the problem is solved on supp(sum_m w_m), where the fixed point is
/// well defined, and any POVM there extends to the full space.
inline MinErrResult maximize_linear(const std::vector<HermitianMatrix>& weights, double eps,
                                    std::size_t max_iter = default_max_iter) {
    if (weights.empty()) {
        throw Error(ErrorKind::InvalidArgument, "no weights");
    }
    const Index n = weights.front().dim();
    HermitianMatrix total = HermitianMatrix::zero(n);
    for (const auto& w : weights) {
        total += w;
    }
    const Spectrum s = eig(total);
    const double cut = s.rank_threshold();
    Index r = 0;
    while (r < n && s.values(r) > cut && s.values(r) > 0.0) {
        ++r;
    }
    if (r == 0) {
        throw Error(ErrorKind::DegenerateInstance, "all weights are zero");
    }
    const Matrix basis = s.vectors.leftCols(r);
    MinErrInstance reduced;
    for (const auto& w : weights) {
        reduced.weights.push_back(HermitianMatrix::symmetrized(basis.adjoint() * w.mat() * basis));
    }
    MinErrResult res = solve_min_error(reduced, eps, max_iter);
    const Matrix complement = Matrix::Identity(n, n) - basis * basis.adjoint();
    Povm lifted;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        Matrix e = basis * res.povm[m].mat() * basis.adjoint();
        if (m == 0) {
            e += complement;
        }
        lifted.elements.push_back(HermitianMatrix::symmetrized(e));
    }
    res.povm = std::move(lifted);
    return res;
}

/// Relaxed problem at fixed multipliers as a minimum-error instance:
/// weights z_m(lambda) and C = 1 / sum_k Tr z_k(lambda), so that the average
/// correct probability of the normalized ensemble equals C * g(Pi; lambda).
struct ModifiedReduction {
    MinErrInstance instance;
    double scale = 0.0;                // C
    std::vector<double> priors;        // xi_m = C Tr z_m, zero for zero-trace outcomes
};

inline ModifiedReduction reduce_modified(const DiscriminationProblem& p,
                                         const std::vector<double>& lambda) {
    ModifiedReduction out;
    out.instance.weights = z_operators(p, lambda);
    double total = 0.0;
    for (const auto& z : out.instance.weights) {
        total += z.trace();
    }
    if (!(total > 0.0)) {
        throw Error(ErrorKind::DegenerateInstance, "all z_m(lambda) vanish");
    }
    out.scale = 1.0 / total;
    for (const auto& z : out.instance.weights) {
        out.priors.push_back(std::max(z.trace(), 0.0) * out.scale);
    }
    return out;
}

/// Average correct probability of the ensemble xi_m, rho_m = z_m / Tr z_m.
inline double reduced_correct_probability(const ModifiedReduction& red, const Povm& povm) {
    double acc = 0.0;
    for (std::size_t m = 0; m < red.priors.size(); ++m) {
        const double tr = red.instance.weights[m].trace();
        if (red.priors[m] == 0.0 || !(tr > 0.0)) {
            continue;
        }
        acc += red.priors[m] * trace_product(red.instance.weights[m] * (1.0 / tr), povm[m]);
    }
    return acc;
}

} // namespace qdisc
