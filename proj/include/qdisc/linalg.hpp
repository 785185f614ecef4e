#pragma once

// Dense complex Hermitian kernel. Every operator in the library (objective and
// constraint weights, POVM elements, dual certificates) is a HermitianMatrix.
// Spectral work is delegated to Eigen's self-adjoint eigensolver; this header
// adds the validation, clamping and support-space logic the solvers rely on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdisc/error.hpp"

namespace qdisc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
/// Relative Frobenius tolerance on A - A^dagger.
inline constexpr double herm = 1e-10;
inline constexpr double eig = 1e-10;
/// Absolute eigenvalue slack for PSD / PD decisions, scaled by max(1, |A|_2).
inline constexpr double psd = 1e-12;
/// Eigenvalues at or below rank_rel * lambda_max count as zero.
inline constexpr double rank_rel = 1e-10;
} // namespace tol

class HermitianMatrix {
public:
    HermitianMatrix() = default;

    /// Validates Hermitian symmetry within tol::herm and stores (A + A^dagger)/2.
    explicit HermitianMatrix(const Matrix& m) {
        if (m.rows() != m.cols()) {
            throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
        }
        if (m.rows() < 1) {
            throw Error(ErrorKind::InvalidArgument, "matrix dimension must be at least 1");
        }
        const double norm = m.norm();
        const double asym = (m - m.adjoint()).norm();
        if (!(asym <= tol::herm * norm) && asym != 0.0) {
            throw Error(ErrorKind::NonHermitian,
                        "relative asymmetry " + std::to_string(norm > 0 ? asym / norm : asym));
        }
        if (!m.allFinite()) {
            throw Error(ErrorKind::NumericalFailure, "matrix has non-finite entries");
        }
        m_ = (m + m.adjoint()) * 0.5;
    }

    /// Symmetrizes without the tolerance check. For products such as A*B*A whose
    /// Hermiticity is structural and whose asymmetry is pure round-off.
    static HermitianMatrix symmetrized(const Matrix& m) {
        HermitianMatrix h;
        h.m_ = (m + m.adjoint()) * 0.5;
        return h;
    }

    static HermitianMatrix identity(Index n) { return symmetrized(Matrix::Identity(n, n)); }
    static HermitianMatrix zero(Index n) { return symmetrized(Matrix::Zero(n, n)); }

    static HermitianMatrix diagonal(const std::vector<double>& d) {
        Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
        }
        return symmetrized(m);
    }

    /// Rank-one projector |v><v| / <v|v>.
    static HermitianMatrix projector(const Eigen::VectorXcd& v) {
        return symmetrized(v * v.adjoint() / v.squaredNorm());
    }

    Index dim() const noexcept { return m_.rows(); }
    const Matrix& mat() const noexcept { return m_; }
    Complex operator()(Index i, Index j) const { return m_(i, j); }

    double trace() const { return m_.trace().real(); }
    double frobenius() const { return m_.norm(); }

    HermitianMatrix& operator+=(const HermitianMatrix& o) {
        check_same_dim(o);
        m_ += o.m_;
        return *this;
    }
    HermitianMatrix& operator-=(const HermitianMatrix& o) {
        check_same_dim(o);
        m_ -= o.m_;
        return *this;
    }
    HermitianMatrix& operator*=(double s) {
        m_ *= s;
        return *this;
    }

    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
    friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

    friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    void check_same_dim(const HermitianMatrix& o) const {
        if (o.dim() != dim()) {
            throw Error(ErrorKind::DimensionMismatch,
                        "dims " + std::to_string(dim()) + " vs " + std::to_string(o.dim()));
        }
    }

    Matrix m_;
};

/// Tr(A B) for Hermitian A, B in O(N^2).
inline double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "trace_product operands differ in dimension");
    }
    return a.mat().cwiseProduct(b.mat().conjugate()).sum().real();
}

/// A * B * A, symmetrized.
inline HermitianMatrix sandwich(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "sandwich operands differ in dimension");
    }
    return HermitianMatrix::symmetrized(a.mat() * b.mat() * a.mat());
}

struct Spectrum {
    RealVector values; // descending
    Matrix vectors;    // columns

    Index dim() const noexcept { return values.size(); }
    double max() const { return values(0); }
    double min() const { return values(values.size() - 1); }
    /// max(1, spectral radius): the scale PSD slack is measured against.
    double scale() const { return std::max({1.0, std::abs(max()), std::abs(min())}); }
    double rank_threshold() const { return tol::rank_rel * std::max(max(), 0.0); }
};

inline Spectrum eig(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure, "self-adjoint eigensolver did not converge");
    }
    Spectrum s;
    s.values = solver.eigenvalues().reverse();
    s.vectors = solver.eigenvectors().rowwise().reverse();
    return s;
}

/// V diag(f(w)) V^dagger.
template <class F>
HermitianMatrix spectral_apply(const Spectrum& s, F&& f) {
    RealVector w(s.dim());
    for (Index i = 0; i < s.dim(); ++i) {
        w(i) = f(s.values(i));
    }
    return HermitianMatrix::symmetrized(s.vectors * w.asDiagonal() * s.vectors.adjoint());
}

inline double min_eigenvalue(const HermitianMatrix& a) { return eig(a).min(); }
inline double max_eigenvalue(const HermitianMatrix& a) { return eig(a).max(); }

inline bool is_psd(const HermitianMatrix& a, double slack = tol::psd) {
    const Spectrum s = eig(a);
    return s.min() >= -slack * s.scale();
}

inline HermitianMatrix inv_sqrt(const Spectrum& s) {
    if (s.min() <= tol::psd * s.scale()) {
        throw Error(ErrorKind::NotPositiveDefinite,
                    "minimum eigenvalue " + std::to_string(s.min()));
    }
    return spectral_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
}

inline HermitianMatrix inv_sqrt(const HermitianMatrix& a) { return inv_sqrt(eig(a)); }

inline void require_psd(const Spectrum& s, const char* what) {
    if (s.min() < -tol::psd * s.scale()) {
        throw Error(ErrorKind::NotPsd,
                    std::string(what) + ": eigenvalue " + std::to_string(s.min()));
    }
}

inline HermitianMatrix sqrt_psd(const Spectrum& s) {
    require_psd(s, "sqrt_psd");
    return spectral_apply(s, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

inline HermitianMatrix sqrt_psd(const HermitianMatrix& a) { return sqrt_psd(eig(a)); }

inline HermitianMatrix pinv(const HermitianMatrix& a) {
    const Spectrum s = eig(a);
    const double cut = tol::rank_rel * std::max(std::abs(s.max()), std::abs(s.min()));
    return spectral_apply(s, [cut](double x) { return std::abs(x) > cut ? 1.0 / x : 0.0; });
}

inline HermitianMatrix support_projector(const HermitianMatrix& a) {
    const Spectrum s = eig(a);
    require_psd(s, "support_projector");
    const double cut = s.rank_threshold();
    return spectral_apply(s, [cut](double x) { return x > cut ? 1.0 : 0.0; });
}

inline Index numerical_rank(const HermitianMatrix& a) {
    const Spectrum s = eig(a);
    const double cut = s.rank_threshold();
    return (s.values.array() > cut).count();
}

/// N x r factor Q with A = Q Q^dagger, r the numerical rank of the PSD matrix A.
/// The zero matrix yields an N x 0 factor.
inline Matrix psd_factor(const HermitianMatrix& a) {
    const Spectrum s = eig(a);
    require_psd(s, "psd_factor");
    const double cut = s.rank_threshold();
    Index r = 0;
    while (r < s.dim() && s.values(r) > cut && s.values(r) > 0.0) {
        ++r;
    }
    Matrix q(a.dim(), r);
    for (Index k = 0; k < r; ++k) {
        q.col(k) = s.vectors.col(k) * std::sqrt(s.values(k));
    }
    return q;
}

/// Largest eigenvalue of q^dagger Yinv q (an r x r problem). Equals the largest
/// eigenvalue of Yinv^{1/2} q q^dagger Yinv^{1/2}, since B B^dagger and
/// B^dagger B share their nonzero spectrum. Returns 0 for an empty factor.
inline double max_eigenvalue_lowrank(const Matrix& q, const HermitianMatrix& yinv) {
    if (q.rows() != yinv.dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "factor has " + std::to_string(q.rows()) + " rows, operator dim " +
                        std::to_string(yinv.dim()));
    }
    if (q.cols() == 0) {
        return 0.0;
    }
    const Matrix small = q.adjoint() * yinv.mat() * q;
    return max_eigenvalue(HermitianMatrix::symmetrized(small));
}

} // namespace qdisc
