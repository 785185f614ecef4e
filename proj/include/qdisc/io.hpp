#pragma once

// Canonical JSON for problems and POVMs, the solve report, and the CSV sinks.
// Matrices are row-major N x N arrays of [re, im] pairs; every double is
// written with 17 significant digits so parse(render(x)) is bit-exact.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdisc/bench.hpp"
#include "qdisc/gsolver.hpp"
#include "qdisc/problem.hpp"

namespace qdisc::io {

using Json = nlohmann::json;

inline std::string fmt(double x) {
    if (!std::isfinite(x)) {
        throw Error(ErrorKind::InvalidArgument, "cannot serialize a non-finite value");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void put_matrix(std::string& out, const HermitianMatrix& a) {
    out += '[';
    for (Index i = 0; i < a.dim(); ++i) {
        out += i ? ",[" : "[";
        for (Index j = 0; j < a.dim(); ++j) {
            const Complex v = a(i, j);
            out += j ? ",[" : "[";
            out += fmt(v.real());
            out += ',';
            out += fmt(v.imag());
            out += ']';
        }
        out += ']';
    }
    out += ']';
}

inline void put_matrices(std::string& out, const std::vector<HermitianMatrix>& ms) {
    out += '[';
    for (std::size_t k = 0; k < ms.size(); ++k) {
        if (k) out += ',';
        put_matrix(out, ms[k]);
    }
    out += ']';
}

inline void put_reals(std::string& out, const std::vector<double>& xs) {
    out += '[';
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k) out += ',';
        out += fmt(xs[k]);
    }
    out += ']';
}

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

inline const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        bad(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

inline double real(const Json& j, const std::string& where) {
    if (!j.is_number()) {
        bad(where + ": expected a number");
    }
    return j.get<double>();
}

inline std::size_t count(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        bad(std::string("\"") + key + "\" must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

inline HermitianMatrix matrix(const Json& j, Index n, const std::string& where) {
    if (!j.is_array() || static_cast<Index>(j.size()) != n) {
        bad(where + ": expected " + std::to_string(n) + " rows");
    }
    Matrix m(n, n);
    for (Index r = 0; r < n; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n) {
            bad(where + ": row " + std::to_string(r) + " is not of length " + std::to_string(n));
        }
        for (Index c = 0; c < n; ++c) {
            const Json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_array() || e.size() != 2) {
                bad(where + ": entry is not an [re, im] pair");
            }
            m(r, c) = Complex(real(e[0], where), real(e[1], where));
        }
    }
    return HermitianMatrix(m);
}

inline std::vector<HermitianMatrix> matrices(const Json& j, std::size_t count, Index n,
                                             const std::string& where) {
    if (!j.is_array() || j.size() != count) {
        bad(where + ": expected " + std::to_string(count) + " matrices");
    }
    std::vector<HermitianMatrix> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(matrix(j[k], n, where + "[" + std::to_string(k) + "]"));
    }
    return out;
}

inline std::vector<double> reals(const Json& j, std::size_t count, const std::string& where) {
    if (!j.is_array() || j.size() != count) {
        bad(where + ": expected " + std::to_string(count) + " numbers");
    }
    std::vector<double> out;
    for (const auto& x : j) {
        out.push_back(real(x, where));
    }
    return out;
}

inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
}

} // namespace detail

inline std::string render_problem(const DiscriminationProblem& p) {
    std::string out = "{\"dim\":" + std::to_string(p.dim) + ",\"M\":" + std::to_string(p.num_outcomes()) +
                      ",\"J\":" + std::to_string(p.num_constraints()) + ",\"c\":";
    detail::put_matrices(out, p.c);
    out += ",\"a\":[";
    for (std::size_t j = 0; j < p.a.size(); ++j) {
        if (j) out += ',';
        detail::put_matrices(out, p.a[j]);
    }
    out += "],\"b\":";
    detail::put_reals(out, p.b);
    if (p.objective_offset != 0.0) {
        out += ",\"offset\":" + fmt(p.objective_offset);
    }
    out += "}\n";
    return out;
}

inline DiscriminationProblem parse_problem(const std::string& text) {
    const Json j = detail::parse_json(text);
    DiscriminationProblem p;
    const std::size_t n = detail::count(j, "dim");
    const std::size_t m = detail::count(j, "M");
    const std::size_t rows = detail::count(j, "J");
    if (n < 1 || m < 1) {
        detail::bad("dim and M must be at least 1");
    }
    p.dim = static_cast<Index>(n);
    p.c = detail::matrices(detail::field(j, "c"), m, p.dim, "c");
    const Json& a = detail::field(j, "a");
    if (!a.is_array() || a.size() != rows) {
        detail::bad("a: expected " + std::to_string(rows) + " rows");
    }
    for (std::size_t r = 0; r < rows; ++r) {
        p.a.push_back(detail::matrices(a[r], m, p.dim, "a[" + std::to_string(r) + "]"));
    }
    p.b = detail::reals(detail::field(j, "b"), rows, "b");
    if (j.contains("offset")) {
        p.objective_offset = detail::real(j.at("offset"), "offset");
    }
    return p;
}

inline std::string render_povm(const Povm& povm) {
    std::string out = "{\"dim\":" + std::to_string(povm.dim()) + ",\"M\":" + std::to_string(povm.size()) +
                      ",\"elements\":";
    detail::put_matrices(out, povm.elements);
    out += "}\n";
    return out;
}

inline Povm parse_povm(const std::string& text) {
    const Json j = detail::parse_json(text);
    const std::size_t n = detail::count(j, "dim");
    const std::size_t m = detail::count(j, "M");
    if (n < 1 || m < 1) {
        detail::bad("dim and M must be at least 1");
    }
    return Povm{detail::matrices(detail::field(j, "elements"), m, static_cast<Index>(n), "elements")};
}

/// A single operator, {"dim": N, "matrix": [...]}; used for dual operators.
inline std::string render_operator(const HermitianMatrix& x) {
    std::string out = "{\"dim\":" + std::to_string(x.dim()) + ",\"matrix\":";
    detail::put_matrix(out, x);
    out += "}\n";
    return out;
}

inline HermitianMatrix parse_operator(const std::string& text) {
    const Json j = detail::parse_json(text);
    const std::size_t n = detail::count(j, "dim");
    if (n < 1) {
        detail::bad("dim must be at least 1");
    }
    return detail::matrix(detail::field(j, "matrix"), static_cast<Index>(n), "matrix");
}

// ---------------------------------------------------------------------------
// Solve report

/// The scalar part of a SolveReport as it appears on stdout. Values are on the
/// raw (un-normalized) scale; the normalized ones differ by `offset`.
struct ReportSummary {
    std::string status;
    std::size_t iterations = 0;
    double f_upper = 0.0;
    double f_lower = 0.0;
    double gap = 0.0;
    double offset = 0.0;
    std::vector<double> lambda;
    std::vector<double> beta;
    bool feasible = false;

    friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

inline ReportSummary summarize(const DiscriminationProblem& p, const SolveReport& r) {
    return ReportSummary{to_string(r.status), r.iterations, r.raw_f_upper(), r.raw_f_lower(), r.gap,
                         r.objective_offset, r.lambda_final.values, beta_all(p, r.povm),
                         is_feasible(p, r.povm)};
}

namespace detail {
inline std::string finite_or_null(double x) { return std::isfinite(x) ? fmt(x) : "null"; }
inline double null_or_real(const Json& j, const std::string& where) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : real(j, where);
}
} // namespace detail

inline std::string render_report(const ReportSummary& s) {
    std::string out = "{\"status\":\"" + s.status + "\",\"iterations\":" + std::to_string(s.iterations) +
                      ",\"f_upper\":" + detail::finite_or_null(s.f_upper) +
                      ",\"f_lower\":" + detail::finite_or_null(s.f_lower) +
                      ",\"gap\":" + detail::finite_or_null(s.gap) + ",\"offset\":" + fmt(s.offset) +
                      ",\"lambda\":";
    detail::put_reals(out, s.lambda);
    out += ",\"beta\":";
    detail::put_reals(out, s.beta);
    out += std::string(",\"feasible\":") + (s.feasible ? "true" : "false") + "}\n";
    return out;
}

inline ReportSummary parse_report(const std::string& text) {
    const Json j = detail::parse_json(text);
    ReportSummary s;
    const Json& status = detail::field(j, "status");
    if (!status.is_string()) {
        detail::bad("status must be a string");
    }
    s.status = status.get<std::string>();
    s.iterations = detail::count(j, "iterations");
    s.f_upper = detail::null_or_real(detail::field(j, "f_upper"), "f_upper");
    s.f_lower = detail::null_or_real(detail::field(j, "f_lower"), "f_lower");
    s.gap = detail::null_or_real(detail::field(j, "gap"), "gap");
    s.offset = detail::real(detail::field(j, "offset"), "offset");
    const Json& lam = detail::field(j, "lambda");
    s.lambda = detail::reals(lam, lam.is_array() ? lam.size() : 0, "lambda");
    const Json& beta = detail::field(j, "beta");
    s.beta = detail::reals(beta, beta.is_array() ? beta.size() : 0, "beta");
    const Json& feas = detail::field(j, "feasible");
    if (!feas.is_boolean()) {
        detail::bad("feasible must be a boolean");
    }
    s.feasible = feas.get<bool>();
    return s;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string trace_csv(const std::vector<TraceRow>& rows, std::size_t constraints) {
    std::string out = "iter,f_upper,f_lower,gap";
    for (std::size_t j = 0; j < constraints; ++j) out += ",lambda_" + std::to_string(j);
    for (std::size_t j = 0; j < constraints; ++j) out += ",beta_" + std::to_string(j);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.iter) + ',' + detail::finite_or_null(r.f_upper) + ',' + fmt(r.f_lower) +
               ',' + detail::finite_or_null(r.gap);
        for (double x : r.lambda) out += ',' + fmt(x);
        for (double x : r.beta) out += ',' + fmt(x);
        out += '\n';
    }
    return out;
}

inline std::string results_csv(const std::vector<TrialRecord>& trials) {
    std::string out = "kind,R,T,trial,seed,status,iterations,f_upper,f_lower,gap\n";
    for (const auto& t : trials) {
        out += std::string(to_string(t.kind)) + ',' + std::to_string(t.states) + ',' +
               std::to_string(t.rank) + ',' + std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' +
               to_string(t.status) + ',' + std::to_string(t.iterations) + ',' + fmt(t.f_upper) + ',' +
               fmt(t.f_lower) + ',' + fmt(t.gap) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::ParseError, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
    }
}

} // namespace qdisc::io
