// qdisc: solve, generate, benchmark and check generalized discrimination
// problems. JSON on stdout, diagnostics on stderr.
//
// Exit codes: 0 converged (or feasible for `check`), 1 input error,
// 2 iteration limit, 3 infeasible suspected, 4 infeasible POVM.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdisc/qdisc.hpp"

namespace {

using namespace qdisc;

enum Exit { ok = 0, input_error = 1, iteration_limit = 2, infeasible_suspected = 3, infeasible_povm = 4 };

int exit_for(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return ok;
    case SolveStatus::IterationLimit: return iteration_limit;
    case SolveStatus::InfeasibleSuspected: return infeasible_suspected;
    }
    return input_error;
}

DiscriminationProblem load_problem(const std::string& path) {
    DiscriminationProblem raw = io::parse_problem(io::read_file(path));
    for (const auto& v : validate(raw)) {
        if (v.kind == ViolationKind::Shape) {
            throw Error(ErrorKind::ParseError, describe(v));
        }
    }
    return normalize(raw);
}

struct SolveArgs {
    std::string problem;
    double eps = SolverConfig{}.epsilon;
    std::vector<double> kappa;
    std::vector<double> lambda_init;
    std::size_t max_iter = SolverConfig{}.max_iter;
    std::string trace;
    std::size_t trace_every = 1;
    std::string out_povm;
};

int cmd_solve(const SolveArgs& a) {
    const DiscriminationProblem p = load_problem(a.problem);
    SolverConfig cfg;
    cfg.epsilon = a.eps;
    cfg.kappa = a.kappa;
    cfg.lambda_init = a.lambda_init;
    cfg.max_iter = a.max_iter;
    cfg.trace_every = a.trace.empty() ? 0 : a.trace_every;
    const SolveReport r = solve(p, cfg);
    if (!a.trace.empty()) {
        io::write_file(a.trace, io::trace_csv(r.trace, p.num_constraints()));
    }
    if (!a.out_povm.empty()) {
        io::write_file(a.out_povm, io::render_povm(r.povm));
    }
    std::cout << io::render_report(io::summarize(p, r));
    std::cerr << "status " << to_string(r.status) << " after " << r.iterations << " iterations\n";
    return exit_for(r.status);
}

struct GenArgs {
    std::string kind = "first";
    std::size_t states = 4;
    Index rank = 1;
    double fraction = -1.0; // default per kind
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    const ProblemKind kind = a.kind == "first" ? ProblemKind::ConstrainedOutcome0 : ProblemKind::AllOutcomes;
    const double fraction = a.fraction >= 0.0 ? a.fraction : (kind == ProblemKind::ConstrainedOutcome0 ? 0.8 : 0.5);
    const StateEnsemble e = random_ensemble(a.states, a.rank, a.seed);
    const BuiltProblem bp = build(kind, e, fraction);
    io::write_file(a.out, io::render_problem(bp.problem));
    std::cout << "{\"pc_opt\":" << io::fmt(bp.pc_opt) << ",\"fraction\":" << io::fmt(fraction)
              << ",\"dim\":" << bp.problem.dim << ",\"J\":" << bp.problem.num_constraints() << "}\n";
    return ok;
}

struct BenchArgs {
    std::string kind = "first";
    std::size_t states = 4;
    std::vector<Index> ranks{1, 2, 4, 8};
    std::size_t trials = 20;
    double fraction = -1.0;
    std::uint64_t seed = 1;
    double eps = 1e-9;
    std::size_t max_iter = default_max_iter;
    std::string csv;
};

int cmd_bench(const BenchArgs& a) {
    ExperimentSpec spec;
    spec.kind = a.kind == "first" ? ProblemKind::ConstrainedOutcome0 : ProblemKind::AllOutcomes;
    spec.states = a.states;
    spec.ranks = a.ranks;
    spec.trials = a.trials;
    spec.b_fraction = a.fraction >= 0.0 ? a.fraction : (spec.kind == ProblemKind::ConstrainedOutcome0 ? 0.8 : 0.5);
    spec.seed = a.seed;
    spec.epsilon = a.eps;
    spec.max_iter = a.max_iter;
    const ExperimentResult res = run_experiment(spec);
    if (!a.csv.empty()) {
        io::write_file(a.csv, io::results_csv(res.trials));
    }
    std::string out = "{\"kind\":\"" + std::string(to_string(spec.kind)) + "\",\"summary\":[";
    for (std::size_t k = 0; k < res.summary.size(); ++k) {
        const RankSummary& s = res.summary[k];
        if (k) out += ',';
        out += "{\"T\":" + std::to_string(s.rank) + ",\"mean_iterations\":" + io::fmt(s.mean_iterations) +
               ",\"std_iterations\":" + io::fmt(s.std_iterations) + ",\"converged\":" +
               std::to_string(s.converged) + ",\"failures\":" + std::to_string(s.failures) + "}";
    }
    out += "]}\n";
    std::cout << out;
    return ok;
}

struct CheckArgs {
    std::string problem;
    std::string povm;
    std::string dual;
    bool auto_dual = false;
    std::vector<double> lambda;
};

int cmd_check(const CheckArgs& a) {
    const DiscriminationProblem p = load_problem(a.problem);
    const Povm povm = io::parse_povm(io::read_file(a.povm));
    if (const auto v = validate(povm, p.dim); !v.empty() || povm.size() != p.num_outcomes()) {
        std::cerr << (v.empty() ? std::string("POVM has the wrong number of outcomes") : describe(v.front()))
                  << '\n';
        return input_error;
    }
    const double f = objective_f(p, povm);
    const auto beta = beta_all(p, povm);
    const bool feasible = is_feasible(p, povm);

    std::string out = "{\"f\":" + io::fmt(f - p.objective_offset) + ",\"offset\":" + io::fmt(p.objective_offset) +
                      ",\"beta\":[";
    for (std::size_t j = 0; j < beta.size(); ++j) {
        out += (j ? "," : "") + io::fmt(beta[j]);
    }
    out += "],\"b\":[";
    for (std::size_t j = 0; j < p.b.size(); ++j) {
        out += (j ? "," : "") + io::fmt(p.b[j]);
    }
    out += std::string("],\"feasible\":") + (feasible ? "true" : "false");

    if (!a.dual.empty() || a.auto_dual) {
        std::vector<double> lambda = a.lambda;
        if (lambda.empty()) {
            lambda.assign(p.num_constraints(), SolverConfig::default_lambda);
        }
        const Certificate c = a.dual.empty()
                                  ? auto_dual(p, povm, lambda)
                                  : check_dual_feasible(p, io::parse_operator(io::read_file(a.dual)), lambda);
        out += ",\"certificate\":{\"value\":" + io::fmt(c.value - p.objective_offset) +
               ",\"max_violation\":" + io::fmt(c.max_violation) +
               ",\"accepted\":" + (c.accepted() ? "true" : "false") + ",\"gap\":" + io::fmt(c.value - f) + "}";
    }
    out += "}\n";
    std::cout << out;
    return feasible ? ok : infeasible_povm;
}

struct MinerrArgs {
    std::string problem;
    double eps = 1e-9;
    std::size_t max_iter = default_max_iter;
    std::string out_povm;
};

int cmd_minerr(const MinerrArgs& a) {
    const DiscriminationProblem p = load_problem(a.problem);
    if (p.num_constraints() != 0) {
        std::cerr << "minerr ignores the " << p.num_constraints() << " constraint rows\n";
    }
    const MinErrResult r = solve_min_error(MinErrInstance{p.c}, a.eps, a.max_iter);
    if (!a.out_povm.empty()) {
        io::write_file(a.out_povm, io::render_povm(r.povm));
    }
    std::cout << "{\"status\":\"" << to_string(r.status) << "\",\"iterations\":" << r.iterations
              << ",\"value\":" << io::fmt(r.value - p.objective_offset)
              << ",\"upper\":" << io::fmt(r.upper - p.objective_offset) << ",\"gap\":" << io::fmt(r.gap)
              << "}\n";
    return exit_for(r.status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized quantum state discrimination solver"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
    solve_cmd->add_option("problem", sa.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--eps", sa.eps, "Stopping gap")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--kappa", sa.kappa, "Update gains, comma separated")->delimiter(',');
    solve_cmd->add_option("--lambda-init", sa.lambda_init, "Initial multipliers, comma separated")->delimiter(',');
    solve_cmd->add_option("--max-iter", sa.max_iter, "Iteration cap");
    solve_cmd->add_option("--trace", sa.trace, "Trace CSV path");
    solve_cmd->add_option("--trace-every", sa.trace_every, "Trace cadence")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--out-povm", sa.out_povm, "Write the final POVM here");

    GenArgs ga;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random benchmark problem");
    gen_cmd->add_option("--kind", ga.kind, "first (outcome 0 constrained) or all")->check(CLI::IsMember({"first", "all"}));
    gen_cmd->add_option("--states,-R", ga.states, "Number of states")->check(CLI::Range(2, 64));
    gen_cmd->add_option("--rank,-T", ga.rank, "Common rank")->check(CLI::Range(1, 64));
    gen_cmd->add_option("--fraction", ga.fraction, "b as a fraction of the minimum-error optimum")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", ga.seed, "Seed");
    gen_cmd->add_option("--out,-o", ga.out, "Output problem path")->required();

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Iteration counts versus rank");
    bench_cmd->add_option("--kind", ba.kind, "first (outcome 0 constrained) or all")->check(CLI::IsMember({"first", "all"}));
    bench_cmd->add_option("--states,-R", ba.states, "Number of states")->check(CLI::Range(2, 64));
    bench_cmd->add_option("--ranks", ba.ranks, "Ranks, comma separated")->delimiter(',');
    bench_cmd->add_option("--trials", ba.trials, "Trials per rank")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--fraction", ba.fraction, "b fraction")->check(CLI::Range(0.0, 1.0));
    bench_cmd->add_option("--seed", ba.seed, "Seed");
    bench_cmd->add_option("--eps", ba.eps, "Stopping gap")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--max-iter", ba.max_iter, "Iteration cap");
    bench_cmd->add_option("--csv", ba.csv, "Results CSV path");

    CheckArgs ca;
    auto* check_cmd = app.add_subcommand("check", "Check a POVM against a problem");
    check_cmd->add_option("problem", ca.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("povm", ca.povm, "POVM JSON")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("--dual", ca.dual, "Dual operator JSON")->check(CLI::ExistingFile);
    check_cmd->add_flag("--auto-dual", ca.auto_dual, "Build the dual operator from the POVM");
    check_cmd->add_option("--lambda", ca.lambda, "Multipliers for the certificate")->delimiter(',');

    MinerrArgs ma;
    auto* minerr_cmd = app.add_subcommand("minerr", "Minimum-error measurement for the objective operators");
    minerr_cmd->add_option("problem", ma.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
    minerr_cmd->add_option("--eps", ma.eps, "Stopping gap")->check(CLI::PositiveNumber);
    minerr_cmd->add_option("--max-iter", ma.max_iter, "Iteration cap");
    minerr_cmd->add_option("--out-povm", ma.out_povm, "Write the POVM here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return input_error;
    }

    try {
        if (*solve_cmd) return cmd_solve(sa);
        if (*gen_cmd) return cmd_gen(ga);
        if (*bench_cmd) return cmd_bench(ba);
        if (*check_cmd) return cmd_check(ca);
        if (*minerr_cmd) return cmd_minerr(ma);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    }
    return input_error;
}
