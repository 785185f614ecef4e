#include <gtest/gtest.h>

#include <cmath>

#include "qdisc/minerr.hpp"
#include "support.hpp"

using namespace qdisc;
namespace ts = testing_support;

namespace {

MinErrInstance orthogonal_instance() {
    return MinErrInstance{{HermitianMatrix::diagonal({0.5, 0.0}), HermitianMatrix::diagonal({0.0, 0.5})}};
}

Povm matched() {
    return Povm{{HermitianMatrix::diagonal({1.0, 0.0}), HermitianMatrix::diagonal({0.0, 1.0})}};
}

StateEnsemble pure_pair(double overlap_sq, double xi0) {
    const double th = std::acos(std::sqrt(overlap_sq));
    Eigen::VectorXcd v0(2), v1(2);
    v0 << 1.0, 0.0;
    v1 << std::cos(th), Complex(0.0, std::sin(th));
    StateEnsemble e;
    e.priors = {xi0, 1.0 - xi0};
    e.states = {HermitianMatrix::projector(v0), HermitianMatrix::projector(v1)};
    e.rank = 1;
    return e;
}

double povm_defect(const Povm& p) {
    Matrix s = Matrix::Zero(p.dim(), p.dim());
    for (const auto& e : p.elements) s += e.mat();
    return (s - Matrix::Identity(p.dim(), p.dim())).norm();
}

} // namespace

// jezek_step

TEST(JezekStep, OrthogonalOptimumIsFixed) {
    const Povm next = jezek_step(orthogonal_instance(), matched());
    EXPECT_LT((next[0].mat() - matched()[0].mat()).norm(), 1e-14);
    EXPECT_LT((next[1].mat() - matched()[1].mat()).norm(), 1e-14);
}

TEST(JezekStep, EqualWeightsKeepUniform) {
    std::mt19937_64 rng(1);
    const HermitianMatrix w = ts::pd(3, rng);
    const Povm next = jezek_step(MinErrInstance{{w, w, w}}, Povm::uniform(3, 3));
    for (int m = 0; m < 3; ++m) {
        EXPECT_LT((next[m].mat() - Matrix::Identity(3, 3) / 3.0).norm(), 1e-13);
    }
}

TEST(JezekStep, SingularAggregate) {
    const MinErrInstance inst{{HermitianMatrix::diagonal({1.0, 0.0}), HermitianMatrix::diagonal({0.5, 0.0})}};
    try {
        jezek_step(inst, Povm::uniform(2, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularAggregate);
    }
}

TEST(JezekStep, ClosureOnRandomInstances) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> dim(1, 16);
    std::uniform_int_distribution<int> outs(1, 6);
    for (int k = 0; k < 30; ++k) {
        const Index n = dim(rng);
        const std::size_t m = static_cast<std::size_t>(outs(rng));
        const StateEnsemble e = ts::ensemble(n, m, n, rng);
        const MinErrInstance inst = MinErrInstance::from_ensemble(e);
        Povm pi = ts::povm(n, m, rng);
        for (int l = 0; l < 5; ++l) {
            pi = jezek_step(inst, pi);
            EXPECT_LE(povm_defect(pi), tol::povm) << "n=" << n << " m=" << m;
            for (const auto& el : pi.elements) EXPECT_GE(min_eigenvalue(el), -tol::psd);
        }
    }
}

TEST(JezekStep, CorrectProbabilityIsMonotone) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
        const Index rank = 1 + static_cast<Index>(k % 3);
        const StateEnsemble e = ts::ensemble(4 * rank, 4, rank, rng);
        const MinErrInstance inst = MinErrInstance::from_ensemble(e);
        Povm pi = Povm::uniform(inst.dim(), 4);
        double prev = weighted_value(inst.weights, pi);
        for (int l = 0; l < 200; ++l) {
            pi = jezek_step(inst, pi);
            const double now = weighted_value(inst.weights, pi);
            EXPECT_GE(now, prev - 1e-12) << "iteration " << l << " drop " << prev - now;
            prev = now;
        }
    }
}

TEST(JezekStep, ConvergesToHelstrom) {
    const StateEnsemble e = pure_pair(0.5, 0.5);
    const MinErrInstance inst = MinErrInstance::from_ensemble(e);
    Povm pi = Povm::uniform(2, 2);
    for (int l = 0; l < 2000; ++l) pi = jezek_step(inst, pi);
    EXPECT_NEAR(weighted_value(inst.weights, pi), 0.5 * (1.0 + std::sqrt(0.5)), 1e-9);
}

// min_error_gap

TEST(MinErrorGap, OrthogonalAtOptimum) { EXPECT_NEAR(min_error_gap(orthogonal_instance(), matched()), 0.0, 1e-12); }

TEST(MinErrorGap, UniformOnOrthogonal) {
    // Y0 = (sum_m w_m Pi_m w_m)^{1/2} = diag(1/(2 sqrt 2), ...), t_m = 1/sqrt 2,
    // Y = Y0 + (1 - 1/sqrt 2) w_m summed = I/2 exactly, so fU = 1.
    EXPECT_NEAR(min_error_gap(orthogonal_instance(), Povm::uniform(2, 2)), 0.5, 1e-12);
}

TEST(MinErrorGap, NonnegativeOnRandomPovms) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const MinErrInstance inst = MinErrInstance::from_ensemble(ts::ensemble(4, 3, 2, rng));
        EXPECT_GE(min_error_gap(inst, ts::povm(4, 3, rng)), -1e-12);
    }
}

// solve_min_error

TEST(SolveMinError, Orthogonal) {
    const MinErrResult r = solve_min_error(orthogonal_instance(), 1e-9);
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_NEAR(r.value, 1.0, 1e-9);
    EXPECT_LE(r.iterations, 2u);
}

TEST(SolveMinError, SingleState) {
    const MinErrResult r = solve_min_error(MinErrInstance{{HermitianMatrix::diagonal({0.25, 0.75})}}, 1e-9);
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_LT((r.povm[0].mat() - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(SolveMinError, QubitPairMatchesHelstrom) {
    std::mt19937_64 rng(5);
    StateEnsemble e;
    e.priors = {0.3, 0.7};
    e.states = {ts::density(2, 2, rng), ts::density(2, 2, rng)};
    const MinErrResult r = solve_min_error(MinErrInstance::from_ensemble(e), 1e-10);
    ASSERT_EQ(r.status, SolveStatus::Converged);
    EXPECT_NEAR(r.value, ts::helstrom_qubit(0.3, e.states[0], 0.7, e.states[1]), 1e-8);
    EXPECT_LT(min_error_gap(MinErrInstance::from_ensemble(e), r.povm), 1e-9);
}

TEST(SolveMinError, HelstromPairGapAtConvergence) {
    const MinErrInstance inst = MinErrInstance::from_ensemble(pure_pair(0.3, 0.4));
    const MinErrResult r = solve_min_error(inst, 1e-9);
    ASSERT_EQ(r.status, SolveStatus::Converged);
    EXPECT_LT(min_error_gap(inst, r.povm), 1e-9);
    EXPECT_NEAR(r.value, ts::helstrom_qubit(0.4, inst.weights[0] * (1 / 0.4), 0.6, inst.weights[1] * (1 / 0.6)),
                1e-9);
}

TEST(SolveMinError, IterationLimitIsReported) {
    const MinErrResult r = solve_min_error(MinErrInstance::from_ensemble(pure_pair(0.5, 0.3)), 1e-15, 3);
    EXPECT_EQ(r.status, SolveStatus::IterationLimit);
    EXPECT_EQ(r.iterations, 3u);
}

TEST(SolveMinError, RejectsBadArguments) {
    EXPECT_THROW(solve_min_error(orthogonal_instance(), 0.0), Error);
    EXPECT_THROW(solve_min_error(MinErrInstance{{HermitianMatrix::zero(2)}}, 1e-9), Error);
}

TEST(MaximizeLinear, HandlesWeightsThatDoNotSpan) {
    // Weights on a 2-dimensional subspace of C^3.
    const std::vector<HermitianMatrix> w{HermitianMatrix::diagonal({0.6, 0.0, 0.0}),
                                         HermitianMatrix::diagonal({0.0, 0.4, 0.0})};
    const MinErrResult r = maximize_linear(w, 1e-10);
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_NEAR(r.value, 1.0, 1e-9);
    EXPECT_LE(povm_defect(r.povm), tol::povm);
}

// reduce_modified

TEST(ReduceModified, NoConstraints) {
    std::mt19937_64 rng(6);
    const DiscriminationProblem p = ts::problem(3, 3, 0, rng);
    const ModifiedReduction red = reduce_modified(p, {});
    double total = 0.0;
    for (const auto& c : p.c) total += c.trace();
    EXPECT_NEAR(red.scale, 1.0 / total, 1e-15);
    for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(red.instance.weights[m], p.c[m]);
}

TEST(ReduceModified, ZeroMultipliersMatchNoConstraints) {
    std::mt19937_64 rng(7);
    const DiscriminationProblem p = ts::problem(3, 3, 2, rng);
    const ModifiedReduction red = reduce_modified(p, {0.0, 0.0});
    for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(red.instance.weights[m], p.c[m]);
}

TEST(ReduceModified, CorrectProbabilityIsScaledG) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int k = 0; k < 5; ++k) {
        const DiscriminationProblem p = ts::problem(3, 3, 2, rng);
        const std::vector<double> lambda{u(rng), u(rng)};
        const ModifiedReduction red = reduce_modified(p, lambda);
        for (int t = 0; t < 10; ++t) {
            const Povm pi = ts::povm(3, 3, rng);
            // g by direct summation of Tr[(c_m + sum_j lambda_j a_jm) Pi_m].
            double g = 0.0;
            for (std::size_t m = 0; m < 3; ++m) {
                g += ts::trace_product_loop(p.c[m], pi[m]);
                for (std::size_t j = 0; j < 2; ++j) g += lambda[j] * ts::trace_product_loop(p.a[j][m], pi[m]);
            }
            EXPECT_NEAR(reduced_correct_probability(red, pi), red.scale * g, 1e-12);
        }
    }
}

TEST(ReduceModified, DegenerateInstance) {
    DiscriminationProblem p;
    p.dim = 2;
    p.c = {HermitianMatrix::zero(2), HermitianMatrix::zero(2)};
    try {
        reduce_modified(p, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateInstance);
    }
}
