#pragma once

// Random instances and the iteration-count experiments: R states of common
// rank T in dimension N = R T, with either one constrained outcome
// (Tr(rho_0 Pi_0) >= b_0) or every outcome constrained
// (Tr(rho_j Pi_j) >= b_j for all j), b set as a fraction of the
// minimum-error optimum.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qdisc/gsolver.hpp"
#include "qdisc/minerr.hpp"
#include "qdisc/problem.hpp"

namespace qdisc {

/// Deterministic for a fixed seed. Each rho_r = G G^dagger / Tr(G G^dagger)
/// with G an N x T standard complex Gaussian; priors uniform on the simplex.
/// Regenerates until the stacked supports have full column rank.
inline StateEnsemble random_ensemble(std::size_t states, Index rank, std::uint64_t seed) {
    if (states < 1 || rank < 1) {
        throw Error(ErrorKind::InvalidArgument, "need R >= 1 and T >= 1");
    }
    const Index n = static_cast<Index>(states) * rank;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    for (;;) {
        StateEnsemble e;
        e.rank = rank;
        Matrix stacked(n, n);
        for (std::size_t r = 0; r < states; ++r) {
            Matrix g(n, rank);
            for (Index j = 0; j < rank; ++j) {
                for (Index i = 0; i < n; ++i) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    g(i, j) = Complex(re, im) / std::sqrt(2.0);
                }
            }
            stacked.middleCols(static_cast<Index>(r) * rank, rank) = g;
            const Matrix rho = g * g.adjoint();
            e.states.push_back(HermitianMatrix::symmetrized(rho / rho.trace().real()));
        }
        double total = 0.0;
        for (std::size_t r = 0; r < states; ++r) {
            e.priors.push_back(expo(rng));
            total += e.priors.back();
        }
        for (auto& x : e.priors) {
            x /= total;
        }
        const Eigen::JacobiSVD<Matrix> svd(stacked);
        const RealVector sv = svd.singularValues();
        if (sv(sv.size() - 1) > tol::rank_rel * sv(0)) {
            return e;
        }
    }
}

/// Random density operator G G^dagger / Tr(G G^dagger), G an n x k complex
/// Gaussian.
inline HermitianMatrix random_density(Index n, Index k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, k);
    for (Index j = 0; j < k; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            g(i, j) = Complex(re, gauss(rng));
        }
    }
    const Matrix rho = g * g.adjoint();
    return HermitianMatrix::symmetrized(rho / rho.trace().real());
}

/// Qubit problem with M = 2, J = 1: c_m = xi_m rho_m for a random mixed pair,
/// a_{0,0} = sigma_0, a_{0,1} = w sigma_1 with w in [0, 0.5], and b_0 a
/// fraction in [0.7, 0.98] of max_Pi beta_0(Pi).
inline DiscriminationProblem random_qubit_j1(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    StateEnsemble e;
    const double xi = 0.2 + 0.6 * unif(rng);
    e.priors = {xi, 1.0 - xi};
    e.states = {random_density(2, 2, rng), random_density(2, 2, rng)};
    e.rank = 2;
    DiscriminationProblem p = from_min_error(e);
    const double w = 0.5 * unif(rng);
    p.a.push_back({random_density(2, 2, rng), w * random_density(2, 2, rng)});
    const double top = maximize_linear(p.a[0], 1e-12).upper;
    p.b.push_back((0.7 + 0.28 * unif(rng)) * top);
    return p;
}

enum class ProblemKind { ConstrainedOutcome0, AllOutcomes };

inline const char* to_string(ProblemKind k) {
    return k == ProblemKind::ConstrainedOutcome0 ? "first" : "all";
}

struct BuiltProblem {
    DiscriminationProblem problem;
    double pc_opt = 0.0; // minimum-error optimum used to set b
};

inline constexpr double pc_opt_eps = 1e-11;

inline double min_error_optimum(const StateEnsemble& e) {
    return solve_min_error(MinErrInstance::from_ensemble(e), pc_opt_eps).value;
}

/// J = 1: Tr(rho_0 Pi_0) >= fraction * P_C^opt.
inline BuiltProblem build_first_outcome(const StateEnsemble& e, double fraction) {
    BuiltProblem out;
    out.pc_opt = min_error_optimum(e);
    out.problem = from_min_error(e);
    const Index n = out.problem.dim;
    std::vector<HermitianMatrix> row(e.size(), HermitianMatrix::zero(n));
    row[0] = e.states[0];
    out.problem.a.push_back(std::move(row));
    out.problem.b.push_back(fraction * out.pc_opt);
    return out;
}

/// J = R: Tr(rho_j Pi_j) >= fraction * P_C^opt for every j.
inline BuiltProblem build_all_outcomes(const StateEnsemble& e, double fraction) {
    BuiltProblem out;
    out.pc_opt = min_error_optimum(e);
    out.problem = from_min_error(e);
    const Index n = out.problem.dim;
    for (std::size_t j = 0; j < e.size(); ++j) {
        std::vector<HermitianMatrix> row(e.size(), HermitianMatrix::zero(n));
        row[j] = e.states[j];
        out.problem.a.push_back(std::move(row));
        out.problem.b.push_back(fraction * out.pc_opt);
    }
    return out;
}

inline BuiltProblem build(ProblemKind kind, const StateEnsemble& e, double fraction) {
    return kind == ProblemKind::ConstrainedOutcome0 ? build_first_outcome(e, fraction) : build_all_outcomes(e, fraction);
}

/// Row-wise screen: every b_j must lie below max_Pi beta_j(Pi).
inline bool rows_attainable(const DiscriminationProblem& p, double eps = 1e-10) {
    for (std::size_t j = 0; j < p.num_constraints(); ++j) {
        if (p.b[j] <= 0.0) {
            continue;
        }
        if (maximize_linear(p.a[j], eps).value <= p.b[j]) {
            return false;
        }
    }
    return true;
}

struct ExperimentSpec {
    std::size_t states = 4;        // R
    std::vector<Index> ranks{1};   // T values
    std::size_t trials = 20;
    ProblemKind kind = ProblemKind::ConstrainedOutcome0;
    double b_fraction = 0.8;
    std::uint64_t seed = 1;
    double epsilon = 1e-9;
    std::size_t max_iter = default_max_iter;
};

struct TrialRecord {
    ProblemKind kind;
    std::size_t states;
    Index rank;
    std::size_t trial;
    std::uint64_t seed;
    SolveStatus status;
    std::size_t iterations;
    double f_upper, f_lower, gap;
    /// Gap recomputed from the stored certificate and POVM.
    double verified_gap;
    bool verified_feasible;
    double corrected_f; // f of the returned POVM
    double worst_dual_violation;
};

struct RankSummary {
    Index rank;
    double mean_iterations;
    double std_iterations;
    std::size_t converged;
    std::size_t failures;
};

struct ExperimentResult {
    std::vector<TrialRecord> trials;
    std::vector<RankSummary> summary;
};

/// splitmix64 of the experiment seed mixed with (T, trial).
inline std::uint64_t trial_seed(std::uint64_t seed, Index rank, std::size_t trial) {
    std::uint64_t x = seed ^ (static_cast<std::uint64_t>(rank) << 32) ^ static_cast<std::uint64_t>(trial);
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Instance used for (T, trial); re-draws until every row is attainable.
inline BuiltProblem experiment_instance(const ExperimentSpec& spec, Index rank, std::size_t trial,
                                        std::uint64_t& used_seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        used_seed = trial_seed(spec.seed + attempt * 0x632be59bd9b4e019ULL, rank, trial);
        const StateEnsemble e = random_ensemble(spec.states, rank, used_seed);
        BuiltProblem bp = build(spec.kind, e, spec.b_fraction);
        if (rows_attainable(bp.problem)) {
            return bp;
        }
    }
}

inline TrialRecord run_trial(const ExperimentSpec& spec, Index rank, std::size_t trial) {
    std::uint64_t used_seed = 0;
    const BuiltProblem bp = experiment_instance(spec, rank, trial, used_seed);
    SolverConfig cfg;
    cfg.epsilon = spec.epsilon;
    cfg.max_iter = spec.max_iter;
    const SolveReport rep = solve(bp.problem, cfg);

    TrialRecord rec{spec.kind, spec.states, rank, trial, used_seed, rep.status, rep.iterations,
                    rep.f_upper, rep.f_lower, rep.gap, 0.0, false, 0.0, 0.0};
    const auto z = z_operators(bp.problem, rep.certificate_lambda.values);
    rec.worst_dual_violation = dual_violation(rep.certificate, z);
    const double dual_value = rep.certificate.trace() - rep.certificate_lambda.dot(bp.problem.b);
    rec.corrected_f = objective_f(bp.problem, rep.povm);
    rec.verified_gap = dual_value - rec.corrected_f;
    rec.verified_feasible = is_feasible(bp.problem, rep.povm);
    return rec;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.states < 2 || spec.trials < 1 || spec.ranks.empty()) {
        throw Error(ErrorKind::InvalidArgument, "experiment needs R >= 2, trials >= 1, some T");
    }
    ExperimentResult out;
    for (const Index rank : spec.ranks) {
        if (rank < 1) {
            throw Error(ErrorKind::InvalidArgument, "T must be at least 1");
        }
        RankSummary sum{rank, 0.0, 0.0, 0, 0};
        std::vector<double> its;
        for (std::size_t t = 0; t < spec.trials; ++t) {
            out.trials.push_back(run_trial(spec, rank, t));
            const TrialRecord& rec = out.trials.back();
            if (rec.status == SolveStatus::Converged) {
                its.push_back(static_cast<double>(rec.iterations));
            } else {
                ++sum.failures;
            }
        }
        sum.converged = its.size();
        if (!its.empty()) {
            double mean = 0.0;
            for (double x : its) mean += x;
            mean /= static_cast<double>(its.size());
            double var = 0.0;
            for (double x : its) var += (x - mean) * (x - mean);
            sum.mean_iterations = mean;
            sum.std_iterations = its.size() > 1 ? std::sqrt(var / static_cast<double>(its.size() - 1)) : 0.0;
        }
        out.summary.push_back(sum);
    }
    return out;
}

} // namespace qdisc
