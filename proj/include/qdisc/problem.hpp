#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qdisc/error.hpp"
#include "qdisc/linalg.hpp"

namespace qdisc {

namespace tol {
/// Frobenius slack on sum_m Pi_m - I.
inline constexpr double povm = 1e-9;
/// Absolute slack on beta_j(Pi) >= b_j.
inline constexpr double feas = 1e-9;
} // namespace tol

/// maximize sum_m Tr(c_m Pi_m) over POVMs subject to
/// beta_j(Pi) = sum_m Tr(a_{j,m} Pi_m) >= b_j for every constraint row j.
struct DiscriminationProblem {
    Index dim = 0;
    std::vector<HermitianMatrix> c;              // M objective operators
    std::vector<std::vector<HermitianMatrix>> a; // J rows of M constraint operators
    std::vector<double> b;                       // J thresholds
    /// Tr(tau_c) added by normalize(); raw value = normalized value - offset.
    double objective_offset = 0.0;

    std::size_t num_outcomes() const noexcept { return c.size(); }
    std::size_t num_constraints() const noexcept { return b.size(); }

    friend bool operator==(const DiscriminationProblem&, const DiscriminationProblem&) = default;
};

struct Povm {
    std::vector<HermitianMatrix> elements;

    Index dim() const { return elements.empty() ? 0 : elements.front().dim(); }
    std::size_t size() const noexcept { return elements.size(); }
    const HermitianMatrix& operator[](std::size_t m) const { return elements[m]; }

    static Povm uniform(Index n, std::size_t m) {
        Povm p;
        p.elements.assign(m, HermitianMatrix::identity(n) * (1.0 / static_cast<double>(m)));
        return p;
    }

    /// Convex combination w * x + (1 - w) * y.
    static Povm mix(double w, const Povm& x, const Povm& y) {
        if (x.size() != y.size()) {
            throw Error(ErrorKind::DimensionMismatch, "POVMs differ in outcome count");
        }
        Povm out;
        out.elements.reserve(x.size());
        for (std::size_t m = 0; m < x.size(); ++m) {
            out.elements.push_back(w * x[m] + (1.0 - w) * y[m]);
        }
        return out;
    }

    friend bool operator==(const Povm&, const Povm&) = default;
};

struct StateEnsemble {
    std::vector<double> priors;
    std::vector<HermitianMatrix> states;
    Index rank = 0; // common rank T, metadata only

    std::size_t size() const noexcept { return states.size(); }
};

enum class ViolationKind {
    Shape,
    ObjectivePsd,
    ConstraintPsd,
    NegativeThreshold,
    PovmElementPsd,
    PovmCompleteness,
    EnsemblePriors,
    EnsembleTrace,
    EnsemblePsd,
};

struct Violation {
    ViolationKind kind;
    std::size_t row = 0;   // constraint row j, or outcome index for c / POVM
    std::size_t index = 0; // outcome index m for constraint operators
    std::string detail;
};

inline std::string describe(const Violation& v) {
    switch (v.kind) {
    case ViolationKind::Shape: return "Shape: " + v.detail;
    case ViolationKind::ObjectivePsd: return "PsdViolation(c, " + std::to_string(v.row) + ")";
    case ViolationKind::ConstraintPsd:
        return "PsdViolation(a, " + std::to_string(v.row) + ", " + std::to_string(v.index) + ")";
    case ViolationKind::NegativeThreshold:
        return "NegativeThreshold(" + std::to_string(v.row) + ")";
    case ViolationKind::PovmElementPsd: return "PovmViolation(psd, " + std::to_string(v.row) + ")";
    case ViolationKind::PovmCompleteness: return "PovmViolation(completeness): " + v.detail;
    case ViolationKind::EnsemblePriors: return "EnsembleViolation(priors): " + v.detail;
    case ViolationKind::EnsembleTrace: return "EnsembleViolation(trace, " + std::to_string(v.row) + ")";
    case ViolationKind::EnsemblePsd: return "EnsembleViolation(psd, " + std::to_string(v.row) + ")";
    }
    return "Unknown";
}

inline std::vector<Violation> validate(const DiscriminationProblem& p) {
    std::vector<Violation> out;
    const std::size_t m_count = p.num_outcomes();
    if (m_count == 0) {
        out.push_back({ViolationKind::Shape, 0, 0, "M must be at least 1"});
    }
    if (p.a.size() != p.b.size()) {
        out.push_back({ViolationKind::Shape, 0, 0, "a has " + std::to_string(p.a.size()) +
                                                       " rows but b has " + std::to_string(p.b.size())});
    }
    bool shapes_ok = out.empty();
    for (std::size_t m = 0; m < m_count; ++m) {
        if (p.c[m].dim() != p.dim) {
            out.push_back({ViolationKind::Shape, m, 0, "c[" + std::to_string(m) + "] has wrong dim"});
            shapes_ok = false;
        }
    }
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        if (p.a[j].size() != m_count) {
            out.push_back({ViolationKind::Shape, j, 0, "a[" + std::to_string(j) + "] has wrong length"});
            shapes_ok = false;
            continue;
        }
        for (std::size_t m = 0; m < m_count; ++m) {
            if (p.a[j][m].dim() != p.dim) {
                out.push_back({ViolationKind::Shape, j, m, "a[" + std::to_string(j) + "][" +
                                                               std::to_string(m) + "] has wrong dim"});
                shapes_ok = false;
            }
        }
    }
    if (!shapes_ok) {
        return out;
    }
    for (std::size_t m = 0; m < m_count; ++m) {
        if (!is_psd(p.c[m])) {
            out.push_back({ViolationKind::ObjectivePsd, m, 0, {}});
        }
    }
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        for (std::size_t m = 0; m < m_count; ++m) {
            if (!is_psd(p.a[j][m])) {
                out.push_back({ViolationKind::ConstraintPsd, j, m, {}});
            }
        }
    }
    for (std::size_t j = 0; j < p.b.size(); ++j) {
        if (p.b[j] < 0.0) {
            out.push_back({ViolationKind::NegativeThreshold, j, 0, {}});
        }
    }
    return out;
}

inline std::vector<Violation> validate(const Povm& povm, Index dim) {
    std::vector<Violation> out;
    if (povm.size() == 0) {
        out.push_back({ViolationKind::Shape, 0, 0, "POVM has no elements"});
        return out;
    }
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t m = 0; m < povm.size(); ++m) {
        if (povm[m].dim() != dim) {
            out.push_back({ViolationKind::Shape, m, 0, "element " + std::to_string(m) + " has wrong dim"});
            return out;
        }
        if (!is_psd(povm[m])) {
            out.push_back({ViolationKind::PovmElementPsd, m, 0, {}});
        }
        sum += povm[m].mat();
    }
    const double dev = (sum - Matrix::Identity(dim, dim)).norm();
    if (dev > tol::povm) {
        out.push_back({ViolationKind::PovmCompleteness, 0, 0,
                       "|sum - I|_F = " + std::to_string(dev)});
    }
    return out;
}

inline std::vector<Violation> validate(const StateEnsemble& e) {
    std::vector<Violation> out;
    if (e.priors.size() != e.states.size() || e.states.empty()) {
        out.push_back({ViolationKind::Shape, 0, 0, "priors and states differ in length"});
        return out;
    }
    double total = 0.0;
    for (double x : e.priors) {
        if (x < 0.0) {
            out.push_back({ViolationKind::EnsemblePriors, 0, 0, "negative prior"});
        }
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        out.push_back({ViolationKind::EnsemblePriors, 0, 0, "priors sum to " + std::to_string(total)});
    }
    for (std::size_t r = 0; r < e.states.size(); ++r) {
        if (std::abs(e.states[r].trace() - 1.0) > 1e-10) {
            out.push_back({ViolationKind::EnsembleTrace, r, 0, {}});
        }
        if (!is_psd(e.states[r])) {
            out.push_back({ViolationKind::EnsemblePsd, r, 0, {}});
        }
    }
    return out;
}

namespace detail {

/// max(0, -min eigenvalue) over a family, zero when already PSD within slack.
inline double identity_shift(const std::vector<HermitianMatrix>& ops) {
    double shift = 0.0;
    for (const auto& op : ops) {
        const Spectrum s = eig(op);
        if (s.min() < -tol::psd * s.scale()) {
            shift = std::max(shift, -s.min());
        }
    }
    return shift;
}

} // namespace detail

/// Shifts every objective operator by sigma_c * I and every constraint row by
/// sigma_j * I so all operators become PSD, moves b_j by Tr(sigma_j I), then
/// clamps b_j at zero. The objective shift is accumulated in objective_offset.
inline DiscriminationProblem normalize(DiscriminationProblem p) {
    const auto n = static_cast<double>(p.dim);
    const double sc = detail::identity_shift(p.c);
    if (sc > 0.0) {
        const HermitianMatrix tau = HermitianMatrix::identity(p.dim) * sc;
        for (auto& c : p.c) {
            c += tau;
        }
        p.objective_offset += sc * n;
    }
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        const double sj = detail::identity_shift(p.a[j]);
        if (sj > 0.0) {
            const HermitianMatrix tau = HermitianMatrix::identity(p.dim) * sj;
            for (auto& a : p.a[j]) {
                a += tau;
            }
            p.b[j] += sj * n;
        }
        if (p.b[j] < 0.0) {
            p.b[j] = 0.0;
        }
    }
    return p;
}

/// Minimum-error discrimination as a J = 0 problem with c_m = xi_m rho_m.
inline DiscriminationProblem from_min_error(const StateEnsemble& e) {
    if (e.states.empty() || e.priors.size() != e.states.size()) {
        throw Error(ErrorKind::InvalidArgument, "ensemble priors and states differ in length");
    }
    DiscriminationProblem p;
    p.dim = e.states.front().dim();
    for (std::size_t r = 0; r < e.states.size(); ++r) {
        p.c.push_back(e.priors[r] * e.states[r]);
    }
    return p;
}

namespace detail {

inline void check_povm_shape(const DiscriminationProblem& p, const Povm& povm) {
    if (povm.size() != p.num_outcomes()) {
        throw Error(ErrorKind::DimensionMismatch, "POVM has " + std::to_string(povm.size()) +
                                                      " elements, problem has M = " +
                                                      std::to_string(p.num_outcomes()));
    }
    for (const auto& e : povm.elements) {
        if (e.dim() != p.dim) {
            throw Error(ErrorKind::DimensionMismatch, "POVM element dimension differs from problem");
        }
    }
}

inline double linear_functional(const std::vector<HermitianMatrix>& ops, const Povm& povm) {
    double acc = 0.0;
    for (std::size_t m = 0; m < ops.size(); ++m) {
        acc += trace_product(ops[m], povm[m]);
    }
    return acc;
}

} // namespace detail

inline double objective_f(const DiscriminationProblem& p, const Povm& povm) {
    detail::check_povm_shape(p, povm);
    return detail::linear_functional(p.c, povm);
}

inline double beta_j(const DiscriminationProblem& p, const Povm& povm, std::size_t j) {
    if (j >= p.num_constraints()) {
        throw Error(ErrorKind::IndexOutOfRange, "constraint " + std::to_string(j) + " of " +
                                                    std::to_string(p.num_constraints()));
    }
    detail::check_povm_shape(p, povm);
    return detail::linear_functional(p.a[j], povm);
}

inline std::vector<double> beta_all(const DiscriminationProblem& p, const Povm& povm) {
    std::vector<double> out(p.num_constraints());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = beta_j(p, povm, j);
    }
    return out;
}

inline bool satisfies(const std::vector<double>& beta, const std::vector<double>& b,
                      double slack = tol::feas) {
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (beta[j] < b[j] - slack) {
            return false;
        }
    }
    return true;
}

inline bool is_feasible(const DiscriminationProblem& p, const Povm& povm) {
    return satisfies(beta_all(p, povm), p.b);
}

/// Rank of sum of all operators: the dimension of the span of their supports.
inline Index support_dimension(const DiscriminationProblem& p) {
    HermitianMatrix total = HermitianMatrix::zero(p.dim);
    for (const auto& c : p.c) {
        total += c;
    }
    for (const auto& row : p.a) {
        for (const auto& a : row) {
            total += a;
        }
    }
    return numerical_rank(total);
}

} // namespace qdisc
