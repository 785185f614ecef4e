#pragma once

// The Lagrangian-relaxed problem: for fixed multipliers lambda >= 0,
// maximize g(Pi; lambda) = sum_m Tr[z_m(lambda) Pi_m] over all POVMs, where
// z_m(lambda) = c_m + sum_j lambda_j a_{j,m}.

#include <vector>

#include "qdisc/linalg.hpp"
#include "qdisc/problem.hpp"

namespace qdisc {

inline void check_multipliers(const DiscriminationProblem& p, const std::vector<double>& lambda) {
    if (lambda.size() != p.num_constraints()) {
        throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(p.num_constraints()) +
                                                      " multipliers, got " +
                                                      std::to_string(lambda.size()));
    }
    for (double l : lambda) {
        if (!(l >= 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "multipliers must be nonnegative");
        }
    }
}

inline std::vector<HermitianMatrix> z_operators(const DiscriminationProblem& p,
                                                const std::vector<double>& lambda) {
    check_multipliers(p, lambda);
    std::vector<HermitianMatrix> z = p.c;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (lambda[j] == 0.0) {
            continue;
        }
        for (std::size_t m = 0; m < z.size(); ++m) {
            z[m] += lambda[j] * p.a[j][m];
        }
    }
    return z;
}

inline double g_objective(const DiscriminationProblem& p, const std::vector<double>& lambda,
                          const Povm& povm) {
    detail::check_povm_shape(p, povm);
    return detail::linear_functional(z_operators(p, lambda), povm);
}

/// Low-rank factors q_m(lambda) with z_m(lambda) = q q^dagger, assembled from
/// factors of the individual operators so that no per-iteration
/// eigendecomposition of z_m is needed. Column count may exceed rank z_m.
class ZFactors {
public:
    ZFactors() = default;

    explicit ZFactors(const DiscriminationProblem& p) {
        c_.reserve(p.num_outcomes());
        for (const auto& c : p.c) {
            c_.push_back(psd_factor(c));
        }
        a_.resize(p.num_constraints());
        for (std::size_t j = 0; j < p.num_constraints(); ++j) {
            for (const auto& a : p.a[j]) {
                a_[j].push_back(psd_factor(a));
            }
        }
    }

    Matrix factor(std::size_t m, const std::vector<double>& lambda) const {
        Index cols = c_[m].cols();
        for (std::size_t j = 0; j < a_.size(); ++j) {
            if (lambda[j] > 0.0) {
                cols += a_[j][m].cols();
            }
        }
        Matrix q(c_[m].rows(), cols);
        Index at = 0;
        q.middleCols(at, c_[m].cols()) = c_[m];
        at += c_[m].cols();
        for (std::size_t j = 0; j < a_.size(); ++j) {
            if (lambda[j] > 0.0) {
                const Index k = a_[j][m].cols();
                q.middleCols(at, k) = a_[j][m] * std::sqrt(lambda[j]);
                at += k;
            }
        }
        return q;
    }

    std::vector<Matrix> factors(const std::vector<double>& lambda) const {
        std::vector<Matrix> out;
        out.reserve(c_.size());
        for (std::size_t m = 0; m < c_.size(); ++m) {
            out.push_back(factor(m, lambda));
        }
        return out;
    }

private:
    std::vector<Matrix> c_;
    std::vector<std::vector<Matrix>> a_;
};

} // namespace qdisc
