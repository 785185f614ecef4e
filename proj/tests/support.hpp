#pragma once

// Random instances for tests. Nothing here calls into the solver paths under
// test except where a test says so.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qdisc/linalg.hpp"
#include "qdisc/problem.hpp"

namespace testing_support {

using qdisc::Complex;
using qdisc::HermitianMatrix;
using qdisc::Index;
using qdisc::Matrix;

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            m(i, j) = Complex(re, g(rng));
        }
    }
    return m;
}

/// Random Hermitian with i.i.d. Gaussian entries.
inline HermitianMatrix hermitian(Index n, std::mt19937_64& rng) {
    const Matrix g = gaussian(n, n, rng);
    return HermitianMatrix::symmetrized(g + g.adjoint());
}

/// Random PSD matrix of rank r.
inline HermitianMatrix psd(Index n, Index r, std::mt19937_64& rng) {
    const Matrix g = gaussian(n, r, rng);
    return HermitianMatrix::symmetrized(g * g.adjoint());
}

/// Rank-r PSD matrix with nonzero eigenvalues in [1, 2] on a random subspace.
inline HermitianMatrix psd_conditioned(Index n, Index r, std::mt19937_64& rng) {
    const Eigen::HouseholderQR<Matrix> qr(gaussian(n, r, rng));
    const Matrix q = qr.householderQ() * Matrix::Identity(n, r);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    Eigen::VectorXd d(r);
    for (Index i = 0; i < r; ++i) d(i) = u(rng);
    return HermitianMatrix::symmetrized(q * d.asDiagonal() * q.adjoint());
}

/// Well-conditioned positive definite matrix.
inline HermitianMatrix pd(Index n, std::mt19937_64& rng) {
    const Matrix g = gaussian(n, n, rng);
    return HermitianMatrix::symmetrized(g * g.adjoint() + static_cast<double>(n) * Matrix::Identity(n, n));
}

inline HermitianMatrix density(Index n, Index r, std::mt19937_64& rng) {
    HermitianMatrix p = psd(n, r, rng);
    return p * (1.0 / p.trace());
}

/// Random POVM: Lambda A_m Lambda with A_m random PD and Lambda = (sum A)^{-1/2},
/// built by a direct eigendecomposition rather than the library's fixed point.
inline qdisc::Povm povm(Index n, std::size_t m, std::mt19937_64& rng) {
    std::vector<Matrix> parts;
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < m; ++k) {
        parts.push_back(pd(n, rng).mat());
        sum += parts.back();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
    const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().adjoint();
    qdisc::Povm out;
    for (const auto& a : parts) {
        out.elements.push_back(HermitianMatrix::symmetrized(root * a * root));
    }
    return out;
}

inline std::vector<double> simplex(std::size_t m, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(m);
    double t = 0.0;
    for (auto& v : x) {
        v = e(rng);
        t += v;
    }
    for (auto& v : x) v /= t;
    return x;
}

inline qdisc::StateEnsemble ensemble(Index n, std::size_t m, Index rank, std::mt19937_64& rng) {
    qdisc::StateEnsemble e;
    e.priors = simplex(m, rng);
    for (std::size_t k = 0; k < m; ++k) {
        e.states.push_back(density(n, rank, rng));
    }
    e.rank = rank;
    return e;
}

/// Normalized problem with PSD operators and full-rank objective weights.
inline qdisc::DiscriminationProblem problem(Index n, std::size_t m, std::size_t rows, std::mt19937_64& rng,
                                            double b_scale = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    qdisc::DiscriminationProblem p;
    p.dim = n;
    for (std::size_t k = 0; k < m; ++k) {
        p.c.push_back(density(n, n, rng) * (1.0 / static_cast<double>(m)));
    }
    for (std::size_t j = 0; j < rows; ++j) {
        std::vector<HermitianMatrix> row;
        for (std::size_t k = 0; k < m; ++k) {
            row.push_back(k == j % m ? density(n, n, rng) : HermitianMatrix::zero(n));
        }
        p.a.push_back(row);
        p.b.push_back(b_scale * u(rng));
    }
    return p;
}

/// Trace of A B by explicit summation over entries.
inline double trace_product_loop(const HermitianMatrix& a, const HermitianMatrix& b) {
    Complex acc = 0.0;
    for (Index i = 0; i < a.dim(); ++i) {
        for (Index k = 0; k < a.dim(); ++k) {
            acc += a(i, k) * b(k, i);
        }
    }
    return acc.real();
}

/// (1 + |xi0 rho0 - xi1 rho1|_1) / 2 for qubits from the 2 x 2 closed form:
/// the eigenvalues of [[a, c], [c*, d]] are (a + d)/2 +- sqrt(((a - d)/2)^2 + |c|^2).
inline double helstrom_qubit(double xi0, const HermitianMatrix& r0, double xi1, const HermitianMatrix& r1) {
    const double a = xi0 * r0(0, 0).real() - xi1 * r1(0, 0).real();
    const double d = xi0 * r0(1, 1).real() - xi1 * r1(1, 1).real();
    const Complex c = xi0 * r0(0, 1) - xi1 * r1(0, 1);
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(c));
    return 0.5 * (1.0 + std::abs(mid + rad) + std::abs(mid - rad));
}

inline double frob(const Matrix& m) { return m.norm(); }

} // namespace testing_support
