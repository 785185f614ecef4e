#pragma once

// Solver for the constrained problem by iterating the relaxed problem:
// each iteration takes one fixed-point step with weights z_m(lambda), brackets
// the optimum between a dual upper bound and a primal lower bound, and moves
// the multipliers multiplicatively toward complementary slackness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "qdisc/dual.hpp"
#include "qdisc/minerr.hpp"
#include "qdisc/modified.hpp"
#include "qdisc/problem.hpp"

namespace qdisc {

struct Multipliers {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }

    double dot(const std::vector<double>& b) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            acc += values[j] * b[j];
        }
        return acc;
    }
};

struct SolverConfig {
    double epsilon = 1e-9;
    std::vector<double> kappa;       // per row; empty means 0.2 everywhere
    std::vector<double> lambda_init; // per row; empty means 1 everywhere
    double lambda_floor = 1e-12;
    double lambda_ceiling = 1e12;
    double lambda_explode = 1e8;
    std::size_t explode_window = 1000;
    std::size_t max_iter = default_max_iter;
    /// Keep a trace row every k-th iteration (0 disables the trace).
    std::size_t trace_every = 0;
    /// Recompute the upper bound every k-th iteration.
    std::size_t bound_every = 1;
    /// Halve kappa_k after this many consecutive sign flips of b_k - beta_k (0 disables).
    std::size_t flip_window = 5;
    /// Check positive definiteness of sum D_m and dual feasibility of Y every iteration.
    bool verify_invariants = false;

    static constexpr double default_kappa = 0.2;
    static constexpr double default_lambda = 1.0;
};

inline void validate_config(const SolverConfig& cfg, std::size_t rows) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
    if (!(cfg.epsilon > 0.0)) fail("epsilon must be positive");
    if (!(cfg.lambda_floor > 0.0)) fail("lambda_floor must be positive");
    if (!cfg.kappa.empty() && cfg.kappa.size() != rows) fail("kappa needs one value per constraint");
    for (double k : cfg.kappa) {
        if (!(k > 0.0)) fail("kappa must be positive");
    }
    if (!cfg.lambda_init.empty() && cfg.lambda_init.size() != rows) {
        fail("lambda_init needs one value per constraint");
    }
    for (double l : cfg.lambda_init) {
        if (!(l >= cfg.lambda_floor)) fail("lambda_init must be at least lambda_floor");
    }
    if (cfg.bound_every == 0) fail("bound_every must be at least 1");
}

// ---------------------------------------------------------------------------
// Upper bound

struct UpperBound {
    double value = 0.0; // Tr Y - lambda.b
    HermitianMatrix y;
};

/// Dual bound for arbitrary multipliers and POVM, from scratch.
inline UpperBound upper_bound(const DiscriminationProblem& p, const std::vector<double>& lambda,
                              const Povm& povm) {
    detail::check_povm_shape(p, povm);
    const auto z = z_operators(p, lambda);
    DualOperator dual = dual_operator(z, povm);
    return {dual.trace() - Multipliers{lambda}.dot(p.b), std::move(dual.y)};
}

/// The fixed-point map with weights z_m(lambda).
inline Povm proposed_step(const DiscriminationProblem& p, const std::vector<double>& lambda,
                          const Povm& povm) {
    detail::check_povm_shape(p, povm);
    return fixed_point_step(z_operators(p, lambda), povm).next;
}

// ---------------------------------------------------------------------------
// Lower bounds

/// Running maximum of f over feasible iterates, with sentinel -eps. Feasible
/// means beta_j >= b_j exactly, as on the chord route, so the bound is always
/// attained by a POVM that meets every threshold.
class HistoryBound {
public:
    explicit HistoryBound(double eps) : f_lower_(-eps) {}

    /// Returns true when the iterate improved the bound.
    bool observe(const Povm& povm, double f, const std::vector<double>& beta,
                 const std::vector<double>& b) {
        if (!satisfies(beta, b, 0.0) || (best_ && f <= f_lower_)) {
            return false;
        }
        f_lower_ = f;
        best_ = povm;
        return true;
    }

    double f_lower() const noexcept { return f_lower_; }
    bool has_feasible() const noexcept { return best_.has_value(); }
    const std::optional<Povm>& best() const noexcept { return best_; }

private:
    double f_lower_;
    std::optional<Povm> best_;
};

/// Best feasible iterate seen so far.
inline Povm correct_povm_general(const HistoryBound& history) {
    if (!history.has_feasible()) {
        throw Error(ErrorKind::NotYetFeasible, "no feasible iterate observed");
    }
    return *history.best();
}

/// Two tracked points (q_S, f_S), (q_L, f_L) of the convex set
/// {(beta_0(Pi), f(Pi))} with q_S < b_0 <= q_L and f_S >= f_L; the chord
/// through them at b_0 is a lower bound on the optimum.
struct BoundTracker {
    double q_s = 0.0, f_s = 0.0;
    double q_l = 0.0, f_l = 0.0;
    Povm povm_s, povm_l;
    double f_lower = 0.0;
    bool has_feasible = false;

    static BoundTracker initialize(const Povm& povm0, double q0, double f0, double b0, double eps) {
        BoundTracker t;
        t.povm_s = povm0;
        t.povm_l = povm0;
        if (q0 < b0) {
            t.q_s = q0;
            t.f_s = f0;
            t.q_l = b0;
            t.f_l = -eps;
            t.f_lower = -eps;
        } else {
            t.q_s = 0.0;
            t.f_s = f0;
            t.q_l = q0;
            t.f_l = f0;
            t.f_lower = f0;
            t.has_feasible = true;
        }
        return t;
    }

    /// ((q_L - b0) f_S + (b0 - q_S) f_L) / (q_L - q_S).
    double chord(double b0) const {
        return ((q_l - b0) * f_s + (b0 - q_s) * f_l) / (q_l - q_s);
    }
};

enum class ChordOutcome { Unchanged, UpdatedS, UpdatedL, DegenerateChord };

/// One lower-bound update with the new iterate (q', f') = (beta_0, f).
///
/// Infeasible side (q' < b0): candidate chord through (q', f') and the L point.
/// Feasible side (q' >= b0): candidate chord through the S point and (q', f'),
/// where the S height is first raised to f' if it is below it, so that the
/// stored bound always equals the chord through the stored points.
inline ChordOutcome chord_lower_bound_update(BoundTracker& t, const Povm& povm, double q, double f,
                                             double b0) {
    if (q < b0) {
        const double gamma = (t.q_l - b0) / (t.q_l - q);
        const double f_tmp = t.f_l + gamma * (f - t.f_l);
        if (t.f_lower < f_tmp) {
            t.f_lower = f_tmp;
            t.q_s = q;
            t.f_s = f;
            t.povm_s = povm;
            return ChordOutcome::UpdatedS;
        }
        return ChordOutcome::Unchanged;
    }
    if (!(q > t.q_s)) {
        return ChordOutcome::DegenerateChord;
    }
    const double gamma = (q - b0) / (q - t.q_s);
    // Written as f + (...) so a feasible point never rounds below its own f.
    const double f_tmp = f + gamma * (std::max(t.f_s, f) - f);
    if (t.f_lower < f_tmp) {
        t.f_lower = f_tmp;
        t.q_l = q;
        t.f_l = f;
        t.povm_l = povm;
        t.has_feasible = true;
        if (t.f_s < t.f_l) {
            t.f_s = t.f_l;
            t.povm_s = t.povm_l;
        }
        return ChordOutcome::UpdatedL;
    }
    return ChordOutcome::Unchanged;
}

inline ChordOutcome chord_lower_bound_update(BoundTracker& t, const Povm& povm,
                                             const DiscriminationProblem& p) {
    return chord_lower_bound_update(t, povm, beta_j(p, povm, 0), objective_f(p, povm), p.b.at(0));
}

/// Mixture of the two tracked POVMs that meets beta_0 >= b0 and attains the
/// chord bound.
inline Povm correct_povm(const BoundTracker& t, double b0) {
    if (!t.has_feasible) {
        throw Error(ErrorKind::NotYetFeasible, "no feasible point tracked yet");
    }
    if (b0 == t.q_l) {
        return t.povm_l;
    }
    if (!(t.q_l > t.q_s) || !(t.q_s < b0)) {
        throw Error(ErrorKind::DegenerateChord, "tracked points do not bracket b0");
    }
    const double w = (t.q_l - b0) / (t.q_l - t.q_s);
    return Povm::mix(w, t.povm_s, t.povm_l);
}

// ---------------------------------------------------------------------------
// Multiplier update

/// lambda_k <- lambda_k exp(kappa_k (b_k - beta_k) / b_k) for rows with b_k > 0,
/// then clamped to [floor, ceiling]. Rows with b_k = 0 are pinned at the floor.
inline Multipliers lambda_update(const Multipliers& lambda, const std::vector<double>& kappa,
                                 const std::vector<double>& b, const std::vector<double>& beta,
                                 double floor = 1e-12,
                                 double ceiling = std::numeric_limits<double>::infinity()) {
    Multipliers out = lambda;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        if (b[k] > 0.0) {
            out.values[k] = lambda[k] * std::exp(kappa[k] * (b[k] - beta[k]) / b[k]);
        } else {
            out.values[k] = floor;
        }
        out.values[k] = std::clamp(out.values[k], floor, ceiling);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Driver

struct TraceRow {
    std::size_t iter = 0;
    double f_upper = 0.0;
    double f_lower = 0.0;
    double gap = 0.0;
    std::vector<double> lambda;
    std::vector<double> beta;
};

struct SolveReport {
    Povm povm; // corrected, feasible when status is Converged
    double f_upper = 0.0; // smallest dual bound seen over the run
    double f_lower = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    SolveStatus status = SolveStatus::IterationLimit;
    Multipliers lambda_final;
    /// Dual operator behind f_upper and the multipliers it was built with.
    HermitianMatrix certificate;
    Multipliers certificate_lambda;
    /// Smallest eigenvalue of sum D_m seen over the run (verify_invariants only).
    double min_aggregate_eigenvalue = std::numeric_limits<double>::infinity();
    /// Most negative eigenvalue of Y - z_m seen over the run (verify_invariants only).
    double worst_dual_violation = std::numeric_limits<double>::infinity();
    std::vector<TraceRow> trace;
    double objective_offset = 0.0;

    double raw_f_upper() const { return f_upper - objective_offset; }
    double raw_f_lower() const { return f_lower - objective_offset; }
};

/// Observer invoked after every iteration; for tests that need the trajectory.
struct IterationView {
    std::size_t iter;
    const Povm& next;
    const std::vector<double>& lambda; // multipliers used for this step
    double f_next;
    const std::vector<double>& beta_next;
    double f_upper;
    double f_lower;
    double history_lower;
};

using IterationObserver = std::function<void(const IterationView&)>;

inline SolveReport solve(const DiscriminationProblem& p, const SolverConfig& cfg = {},
                         const IterationObserver& observer = {}) {
    const std::size_t rows = p.num_constraints();
    validate_config(cfg, rows);
    if (const auto v = validate(p); !v.empty()) {
        throw Error(ErrorKind::InvalidArgument, "problem is not normalized: " + describe(v.front()));
    }

    std::vector<double> kappa = cfg.kappa.empty()
                                    ? std::vector<double>(rows, SolverConfig::default_kappa)
                                    : cfg.kappa;
    Multipliers lambda{cfg.lambda_init.empty()
                           ? std::vector<double>(rows, SolverConfig::default_lambda)
                           : cfg.lambda_init};
    for (std::size_t k = 0; k < rows; ++k) {
        if (p.b[k] <= 0.0) {
            lambda.values[k] = cfg.lambda_floor;
        }
    }

    const bool chord_mode = rows == 1 && p.b[0] > 0.0;
    const ZFactors zf(p);

    SolveReport rep;
    rep.objective_offset = p.objective_offset;
    Povm povm = Povm::uniform(p.dim, p.num_outcomes());
    std::vector<Matrix> factors = uniform_factors(p.dim, p.num_outcomes());

    HistoryBound history(cfg.epsilon);
    BoundTracker tracker;
    {
        const auto beta0 = beta_all(p, povm);
        const double f0 = objective_f(p, povm);
        history.observe(povm, f0, beta0, p.b);
        if (chord_mode) {
            tracker = BoundTracker::initialize(povm, beta0[0], f0, p.b[0], cfg.epsilon);
        }
    }
    auto lower = [&] { return chord_mode ? tracker.f_lower : history.f_lower(); };
    auto has_feasible = [&] { return chord_mode ? tracker.has_feasible : history.has_feasible(); };

    std::vector<int> last_sign(rows, 0);
    std::vector<std::size_t> flips(rows, 0);
    std::vector<std::size_t> exploded(rows, 0);

    double f_upper = std::numeric_limits<double>::infinity();
    std::size_t l = 0;
    for (;; ++l) {
        if (l == cfg.max_iter) {
            rep.status = SolveStatus::IterationLimit;
            break;
        }
        const auto z = z_operators(p, lambda.values);
        FixedPointStep step = fixed_point_step(z, factors);
        if (cfg.verify_invariants) {
            rep.min_aggregate_eigenvalue = std::min(rep.min_aggregate_eigenvalue, step.aggregate.min());
        }

        if (l % cfg.bound_every == 0 || l + 1 == cfg.max_iter) {
            DualOperator dual = dual_operator(step.aggregate, z, zf.factors(lambda.values));
            const double bound = dual.trace() - lambda.dot(p.b);
            if (cfg.verify_invariants) {
                rep.worst_dual_violation =
                    std::min(rep.worst_dual_violation, dual_violation(dual.y, z));
            }
            // Every bound is valid whatever lambda produced it, so keep the best.
            if (bound < f_upper) {
                f_upper = bound;
                rep.certificate = std::move(dual.y);
                rep.certificate_lambda = lambda;
            }
            // The chord slope estimates the optimal multiplier. When b sits on a
            // flat face of fo, lambda itself only circles that slope, so the
            // bound is also taken there.
            if (chord_mode && tracker.has_feasible && tracker.q_l > tracker.q_s) {
                const double slope = (tracker.f_s - tracker.f_l) / (tracker.q_l - tracker.q_s);
                if (slope > cfg.lambda_floor && slope < cfg.lambda_ceiling) {
                    const Multipliers at{{slope}};
                    const auto zc = z_operators(p, at.values);
                    DualOperator dc = dual_operator(eig(aggregate(zc, povm)), zc, zf.factors(at.values));
                    const double bc = dc.trace() - slope * p.b[0];
                    if (cfg.verify_invariants) {
                        rep.worst_dual_violation =
                            std::min(rep.worst_dual_violation, dual_violation(dc.y, zc));
                    }
                    if (bc < f_upper) {
                        f_upper = bc;
                        rep.certificate = std::move(dc.y);
                        rep.certificate_lambda = at;
                    }
                }
            }
        }

        const Povm& next = step.next;
        const double f_next = objective_f(p, next);
        const auto beta_next = beta_all(p, next);
        history.observe(next, f_next, beta_next, p.b);
        if (chord_mode) {
            chord_lower_bound_update(tracker, next, beta_next[0], f_next, p.b[0]);
        }
        const double f_lower = lower();
        const double gap = f_upper - f_lower;

        if (observer) {
            observer(IterationView{l, next, lambda.values, f_next, beta_next, f_upper, f_lower,
                                   history.f_lower()});
        }
        if (cfg.trace_every > 0 && l % cfg.trace_every == 0) {
            rep.trace.push_back(TraceRow{l, f_upper, f_lower, gap, lambda.values, beta_next});
        }

        povm = std::move(step.next);
        factors = std::move(step.factors);
        rep.f_upper = f_upper;
        rep.f_lower = f_lower;
        rep.gap = gap;

        if (has_feasible() && gap < cfg.epsilon) {
            rep.status = SolveStatus::Converged;
            ++l;
            break;
        }
        // f >= 0 on a normalized problem, so a negative dual bound proves the
        // feasible set empty.
        if (!has_feasible() && f_upper < 0.0) {
            rep.status = SolveStatus::InfeasibleSuspected;
            ++l;
            break;
        }
        bool explode = false;
        for (std::size_t k = 0; k < rows; ++k) {
            if (lambda[k] > cfg.lambda_explode && beta_next[k] < p.b[k]) {
                explode = ++exploded[k] >= cfg.explode_window || explode;
            } else {
                exploded[k] = 0;
            }
        }
        if (explode) {
            rep.status = SolveStatus::InfeasibleSuspected;
            ++l;
            break;
        }

        for (std::size_t k = 0; cfg.flip_window > 0 && k < rows; ++k) {
            const double diff = p.b[k] - beta_next[k];
            const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
            if (sign != 0 && last_sign[k] != 0 && sign != last_sign[k]) {
                if (++flips[k] >= cfg.flip_window) {
                    kappa[k] *= 0.5;
                    flips[k] = 0;
                }
            } else {
                flips[k] = 0;
            }
            last_sign[k] = sign;
        }
        lambda = lambda_update(lambda, kappa, p.b, beta_next, cfg.lambda_floor, cfg.lambda_ceiling);
    }

    rep.iterations = l;
    rep.lambda_final = lambda;
    if (chord_mode && tracker.has_feasible) {
        rep.povm = correct_povm(tracker, p.b[0]);
    } else if (!chord_mode && history.has_feasible()) {
        rep.povm = correct_povm_general(history);
    } else {
        rep.povm = povm;
    }
    return rep;
}

} // namespace qdisc
