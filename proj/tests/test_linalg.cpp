#include <gtest/gtest.h>

#include <cmath>

#include "qdisc/linalg.hpp"
#include "support.hpp"

using namespace qdisc;
namespace ts = testing_support;

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

constexpr Complex I{0.0, 1.0};

} // namespace

TEST(HermitianMatrix, RejectsAsymmetry) {
    EXPECT_THROW(HermitianMatrix(mat2(1.0, 2.0, 0.0, 1.0)), Error);
    try {
        HermitianMatrix(mat2(1.0, I, I, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonHermitian);
    }
}

TEST(HermitianMatrix, RejectsNonSquareAndEmpty) {
    EXPECT_THROW(HermitianMatrix(Matrix::Zero(2, 3)), Error);
    EXPECT_THROW(HermitianMatrix(Matrix::Zero(0, 0)), Error);
}

TEST(HermitianMatrix, SymmetrizesWithinTolerance) {
    Matrix m = mat2(1.0, Complex(0.5, 0.25), Complex(0.5, -0.25 + 1e-14), 2.0);
    const HermitianMatrix h(m);
    EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
    EXPECT_EQ(h(0, 0).imag(), 0.0);
}

TEST(TraceProduct, MatchesEntrywiseSum) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 10; ++k) {
        const HermitianMatrix a = ts::hermitian(5, rng);
        const HermitianMatrix b = ts::hermitian(5, rng);
        EXPECT_NEAR(trace_product(a, b), ts::trace_product_loop(a, b), 1e-11);
    }
}

TEST(Sandwich, MatchesProduct) {
    std::mt19937_64 rng(8);
    const HermitianMatrix a = ts::hermitian(4, rng);
    const HermitianMatrix b = ts::hermitian(4, rng);
    EXPECT_LT((sandwich(a, b).mat() - a.mat() * b.mat() * a.mat()).norm(), 1e-12);
}

// eig

TEST(Eig, Identity) {
    const Spectrum s = eig(HermitianMatrix::identity(2));
    EXPECT_DOUBLE_EQ(s.values(0), 1.0);
    EXPECT_DOUBLE_EQ(s.values(1), 1.0);
}

TEST(Eig, DiagonalSortedDescending) {
    const Spectrum s = eig(HermitianMatrix::diagonal({-1.0, 3.0}));
    EXPECT_NEAR(s.values(0), 3.0, 1e-15);
    EXPECT_NEAR(s.values(1), -1.0, 1e-15);
}

TEST(Eig, TwoByTwoClosedForm) {
    const HermitianMatrix a(mat2(1.0, I, -I, 1.0));
    const Spectrum s = eig(a);
    // (a + d)/2 +- sqrt(((a - d)/2)^2 + |b|^2) = 1 +- 1
    EXPECT_NEAR(s.values(0), 2.0, 1e-14);
    EXPECT_NEAR(s.values(1), 0.0, 1e-14);
}

TEST(Eig, ReconstructionAndUnitarity) {
    std::mt19937_64 rng(11);
    for (Index n : {1, 2, 5, 12, 32}) {
        const HermitianMatrix a = ts::hermitian(n, rng);
        const Spectrum s = eig(a);
        const Matrix rec = s.vectors * s.values.asDiagonal() * s.vectors.adjoint();
        EXPECT_LE((rec - a.mat()).norm(), tol::eig * a.frobenius());
        EXPECT_LE((s.vectors.adjoint() * s.vectors - Matrix::Identity(n, n)).norm(), tol::eig);
        for (Index i = 1; i < n; ++i) {
            EXPECT_GE(s.values(i - 1), s.values(i));
        }
    }
}

// inv_sqrt

TEST(InvSqrt, Examples) {
    EXPECT_LT((inv_sqrt(HermitianMatrix::identity(3)).mat() - Matrix::Identity(3, 3)).norm(), 1e-14);
    const HermitianMatrix b = inv_sqrt(HermitianMatrix::diagonal({4.0, 9.0}));
    EXPECT_NEAR(b(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(b(1, 1).real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(std::abs(b(0, 1)), 0.0, 1e-15);
}

TEST(InvSqrt, RejectsSingular) {
    try {
        inv_sqrt(HermitianMatrix::diagonal({1.0, 0.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
    }
}

TEST(InvSqrt, ResidualAcrossDimensions) {
    std::mt19937_64 rng(12);
    for (Index n = 1; n <= 32; ++n) {
        const HermitianMatrix a = ts::pd(n, rng);
        const HermitianMatrix b = inv_sqrt(a);
        EXPECT_LE((b.mat() * a.mat() * b.mat() - Matrix::Identity(n, n)).norm(), 10 * tol::eig) << n;
        EXPECT_TRUE(is_psd(b));
    }
}

// sqrt_psd

TEST(SqrtPsd, Examples) {
    const HermitianMatrix b = sqrt_psd(HermitianMatrix::diagonal({4.0, 0.0}));
    EXPECT_NEAR(b(0, 0).real(), 2.0, 1e-15);
    EXPECT_NEAR(b(1, 1).real(), 0.0, 1e-15);
    EXPECT_LT((sqrt_psd(HermitianMatrix::identity(2)).mat() - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(SqrtPsd, ClampsRoundOffAndRejectsNegative) {
    EXPECT_NO_THROW(sqrt_psd(HermitianMatrix::diagonal({1.0, -1e-13})));
    try {
        sqrt_psd(HermitianMatrix::diagonal({1.0, -1e-3}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPsd);
    }
}

TEST(SqrtPsd, SquareRecoversInput) {
    std::mt19937_64 rng(13);
    for (Index n : {2, 4, 9}) {
        for (Index r : {Index{1}, n / 2, n}) {
            const HermitianMatrix a = ts::psd(n, r, rng);
            const HermitianMatrix b = sqrt_psd(a);
            EXPECT_LE((b.mat() * b.mat() - a.mat()).norm(), tol::eig * std::max(1.0, a.frobenius()));
            EXPECT_TRUE(is_psd(b));
        }
    }
}

// pinv

TEST(Pinv, Examples) {
    const HermitianMatrix p = pinv(HermitianMatrix::diagonal({2.0, 0.0}));
    EXPECT_NEAR(p(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(p(1, 1).real(), 0.0, 1e-15);
    EXPECT_LT((pinv(HermitianMatrix::identity(2)).mat() - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Pinv, ProjectorIsItsOwnPseudoinverse) {
    std::mt19937_64 rng(14);
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXcd v = ts::gaussian(4, 1, rng).col(0);
        const HermitianMatrix p = HermitianMatrix::projector(v);
        const HermitianMatrix pp = pinv(p);
        EXPECT_LT((p.mat() * pp.mat() * p.mat() - p.mat()).norm(), tol::eig);
        EXPECT_LT((pp.mat() - p.mat()).norm(), 1e-12);
    }
}

TEST(Pinv, PenroseIdentityOnIndefinite) {
    std::mt19937_64 rng(15);
    Matrix g = ts::gaussian(6, 3, rng);
    const HermitianMatrix a = HermitianMatrix::symmetrized(g * Matrix::Identity(3, 3) * g.adjoint()) -
                              ts::psd(6, 2, rng);
    const HermitianMatrix ap = pinv(a);
    EXPECT_LT((a.mat() * ap.mat() * a.mat() - a.mat()).norm(), tol::eig * std::max(1.0, a.frobenius()) * 10);
}

// support_projector

TEST(SupportProjector, Examples) {
    const HermitianMatrix p = support_projector(HermitianMatrix::diagonal({1.0, 0.0}));
    EXPECT_NEAR(p(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(p(1, 1).real(), 0.0, 1e-15);
    EXPECT_LT((support_projector(HermitianMatrix::identity(2)).mat() - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(SupportProjector, RankOneOuterProduct) {
    std::mt19937_64 rng(16);
    const Matrix x = ts::gaussian(5, 1, rng);
    const HermitianMatrix p = support_projector(HermitianMatrix::symmetrized(x * x.adjoint()));
    EXPECT_NEAR(p.trace(), 1.0, 1e-12);
    EXPECT_EQ(numerical_rank(p), 1);
    EXPECT_LT((p.mat() * p.mat() - p.mat()).norm(), tol::eig);
}

TEST(SupportProjector, RejectsIndefinite) {
    EXPECT_THROW(support_projector(HermitianMatrix::diagonal({1.0, -0.5})), Error);
}

// max_eigenvalue_lowrank

TEST(LowRankEigenvalue, Examples) {
    Matrix e0 = Matrix::Zero(2, 1);
    e0(0, 0) = 1.0;
    EXPECT_NEAR(max_eigenvalue_lowrank(e0, HermitianMatrix::identity(2)), 1.0, 1e-15);
    EXPECT_NEAR(max_eigenvalue_lowrank(2.0 * e0, HermitianMatrix::diagonal({0.25, 1.0})), 1.0, 1e-15);
}

TEST(LowRankEigenvalue, DimensionMismatch) {
    try {
        max_eigenvalue_lowrank(Matrix::Zero(3, 1), HermitianMatrix::identity(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(LowRankEigenvalue, AgreesWithDenseRoute) {
    std::mt19937_64 rng(17);
    for (Index n : {2, 5, 10}) {
        for (Index r = 1; r <= n; ++r) {
            const Matrix q = ts::gaussian(n, r, rng);
            const HermitianMatrix y = ts::pd(n, rng);
            const HermitianMatrix yinv = HermitianMatrix::symmetrized(y.mat().inverse());
            // Dense oracle: Yinv^{1/2} z Yinv^{1/2} from a direct Eigen solve.
            Eigen::SelfAdjointEigenSolver<Matrix> es(yinv.mat());
            const Matrix half = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                                es.eigenvectors().adjoint();
            const Matrix dense = half * q * q.adjoint() * half;
            Eigen::SelfAdjointEigenSolver<Matrix> ed((dense + dense.adjoint()) * 0.5);
            const double want = ed.eigenvalues().maxCoeff();
            EXPECT_NEAR(max_eigenvalue_lowrank(q, yinv), want, tol::eig * std::max(1.0, want));
        }
    }
}

TEST(PsdFactor, ReproducesInput) {
    std::mt19937_64 rng(18);
    for (Index r : {0, 1, 3, 6}) {
        const HermitianMatrix a = r == 0 ? HermitianMatrix::zero(6) : ts::psd(6, r, rng);
        const Matrix q = psd_factor(a);
        EXPECT_EQ(q.cols(), r);
        EXPECT_LT((q * q.adjoint() - a.mat()).norm(), 1e-10 * std::max(1.0, a.frobenius()));
    }
}

// Support identities: supp(A B A) = supp A when supp A is inside supp B, and
// supp(A C B C A) = supp A when supp A is inside both supp B and supp C.

TEST(SupportIdentities, SandwichKeepsSupport) {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int k = 0; k < 20; ++k) {
        const Index n = dim(rng);
        const Index r = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
        const HermitianMatrix a = ts::psd(n, r, rng);
        const Index extra = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
        const HermitianMatrix b = a + ts::psd(n, extra, rng);
        const HermitianMatrix aba = sandwich(a, b);
        EXPECT_LT((support_projector(aba).mat() - support_projector(a).mat()).norm(), 1e-6) << k;
    }
}

TEST(SupportIdentities, DoubleSandwichKeepsSupport) {
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int k = 0; k < 20; ++k) {
        const Index n = dim(rng);
        const Index r = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
        const HermitianMatrix a = ts::psd_conditioned(n, r, rng);
        const HermitianMatrix b = a + ts::psd(n, 1, rng);
        const HermitianMatrix c = a * 2.0 + ts::psd(n, 1, rng);
        const Matrix m = a.mat() * c.mat() * b.mat() * c.mat() * a.mat();
        const HermitianMatrix acbca = HermitianMatrix::symmetrized(m);
        EXPECT_EQ(numerical_rank(acbca), r) << k;
        EXPECT_LT((support_projector(acbca).mat() - support_projector(a).mat()).norm(), 1e-6) << k;
    }
}
