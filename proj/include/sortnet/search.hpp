#pragma once

#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "encodings.hpp"
#include "network.hpp"
#include "solver.hpp"

namespace sortnet {

// Wall-clock and range limits for a search. Exhausting a budget yields an
// interval result, never a fabricated optimum.
struct SearchBudget {
    double per_instance_seconds = 0; // 0 = unlimited
    double total_seconds = 0;        // 0 = unlimited
    std::optional<int> max_bound;    // default: C(n,2) for size, n for depth
};

struct TraceEntry {
    std::string instance;
    SolverStatus status = SolverStatus::Unknown;
    double seconds = 0;
    std::int64_t clauses = 0;
    std::int64_t vars = 0;
};

// Outcome of a size or depth minimization. A point optimum v is only
// reported when v was satisfiable and v-1 (if v > 0) unsatisfiable; anything
// weaker is reported as bounds. Lower bounds are solver-attested
// unsatisfiability results, not proofs.
struct SearchResult {
    std::optional<int> optimum;
    int lower_bound = 0;
    std::optional<int> upper_bound;
    std::optional<LayeredNetwork> witness; // certified, at optimum or upper bound
    std::optional<CertificationRecord> certification;
    std::vector<TraceEntry> trace;

    bool resolved() const { return optimum.has_value(); }

    std::string bounds_str() const {
        if (optimum)
            return std::to_string(*optimum);
        std::string out = "[" + std::to_string(lower_bound) + ", ";
        out += upper_bound ? std::to_string(*upper_bound) : "?";
        out += "]";
        return out;
    }
};

namespace detail {

inline Encoding default_encoding(NetworkClass cls, bool fixed_size) {
    if (cls == NetworkClass::SingleException)
        return fixed_size ? Encoding::Sbck : Encoding::Dbck;
    if (cls == NetworkClass::Halver)
        return Encoding::Dfwd;
    return fixed_size ? Encoding::Sfwd : Encoding::Dfwd;
}

class BudgetClock {
public:
    explicit BudgetClock(const SearchBudget& budget)
        : budget_(budget), start_(std::chrono::steady_clock::now()) {}

    bool exhausted() const {
        if (budget_.total_seconds <= 0)
            return false;
        return elapsed() >= budget_.total_seconds;
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    // Per-instance limit, clipped to whatever remains of the total budget.
    double instance_limit() const {
        double limit = budget_.per_instance_seconds;
        if (budget_.total_seconds > 0) {
            const double remaining = budget_.total_seconds - elapsed();
            if (limit <= 0 || remaining < limit)
                limit = remaining > 0.1 ? remaining : 0.1;
        }
        return limit;
    }

private:
    SearchBudget budget_;
    std::chrono::steady_clock::time_point start_;
};

inline TraceEntry to_trace(const SolveOutcome& outcome) {
    return {outcome.spec.describe(), outcome.status, outcome.seconds, outcome.stats.clauses,
            outcome.stats.select_vars + outcome.stats.state_vars + outcome.stats.aux_vars};
}

// Scans bounds upward from `seed` until the first satisfiable instance, then
// settles the optimum if the bound directly below is solver-attested
// unsatisfiable (or the floor was reached).
inline SearchResult scan_upward(ProblemSpec spec, int seed, int max_bound,
                                const SolverConfig& cfg, const SearchBudget& budget) {
    SearchResult result;
    result.lower_bound = seed;
    BudgetClock clock(budget);

    const auto run = [&](int bound) {
        ProblemSpec instance = spec;
        instance.bound = bound;
        SolverConfig instance_cfg = cfg;
        instance_cfg.time_limit_seconds = clock.instance_limit();
        SolveOutcome outcome;
        try {
            outcome = solve_problem(instance, instance_cfg);
        } catch (const solver_error&) {
            // Oversized for the embedded cap (or solver failure): treat as
            // unknown so the search degrades to bounds.
            outcome.spec = instance;
            outcome.status = SolverStatus::Unknown;
        }
        result.trace.push_back(to_trace(outcome));
        return outcome;
    };

    bool prefix_unsat = true; // every bound in [seed, v) solver-attested unsat
    for (int v = seed; v <= max_bound; ++v) {
        if (clock.exhausted())
            break;
        const SolveOutcome outcome = run(v);
        if (outcome.status == SolverStatus::Sat) {
            result.upper_bound = v;
            result.witness = outcome.witness;
            result.certification = outcome.certification;
            bool confirmed_below = prefix_unsat;
            if (v == seed && v > 0) {
                // First probe satisfiable: the bound below still needs a verdict.
                const SolveOutcome below = run(v - 1);
                confirmed_below = below.status == SolverStatus::Unsat;
            }
            if (v == 0 || confirmed_below) {
                result.optimum = v;
                result.lower_bound = v;
            }
            return result;
        }
        if (outcome.status == SolverStatus::Unsat) {
            if (prefix_unsat)
                result.lower_bound = v + 1;
        } else {
            prefix_unsat = false;
        }
    }
    return result; // bounds only
}

} // namespace detail

// Minimum comparator count for the class. The scan seed is 0 for
// single-exception networks and n-1 for sorting networks.
inline SearchResult optimal_size(int n, NetworkClass cls, std::optional<Encoding> encoding,
                                 const SolverConfig& cfg, const SearchBudget& budget = {}) {
    if (cls == NetworkClass::Halver)
        throw argument_error("size search covers sorting and single-exception classes");
    ProblemSpec spec;
    spec.n = n;
    spec.cls = cls;
    spec.encoding = encoding.value_or(detail::default_encoding(cls, true));
    if (!is_fixed_size(spec.encoding))
        throw argument_error("size search requires a fixed-size encoding");
    spec.bound = 0;
    spec.validate();
    const int seed = cls == NetworkClass::SingleException ? 0 : n - 1;
    const int max_bound = budget.max_bound.value_or(n * (n - 1) / 2);
    return detail::scan_upward(spec, seed, max_bound, cfg, budget);
}

// Minimum layer count for the class (halvers included). Seed 0.
inline SearchResult optimal_depth(int n, NetworkClass cls, std::optional<Encoding> encoding,
                                  const SolverConfig& cfg, const SearchBudget& budget = {},
                                  Rational eps = Rational(0, 1), bool cross_half_only = false) {
    ProblemSpec spec;
    spec.n = n;
    spec.cls = cls;
    spec.encoding = encoding.value_or(detail::default_encoding(cls, false));
    if (is_fixed_size(spec.encoding))
        throw argument_error("depth search requires a fixed-depth encoding");
    spec.eps = eps;
    spec.cross_half_only = cross_half_only;
    spec.bound = 0;
    spec.validate();
    const int max_bound = budget.max_bound.value_or(n);
    return detail::scan_upward(spec, 0, max_bound, cfg, budget);
}

// One point of the size/depth trade-off curve.
struct ParetoPoint {
    int size = 0;
    int depth = 0;
    LayeredNetwork witness{1};
};

struct ParetoResult {
    std::vector<ParetoPoint> points; // non-dominated, by increasing depth
    bool complete = false;           // frontier fully settled within budget
    std::vector<TraceEntry> trace;
};

// Walks depths upward from the depth optimum; at each depth the minimal
// feasible comparator count is found by tightening a cardinality cap until
// the solver attests unsatisfiability. Stops when extra depth no longer
// buys a smaller size.
inline ParetoResult pareto_size_depth(int n, NetworkClass cls, const SolverConfig& cfg,
                                      const SearchBudget& budget = {}) {
    if (cls == NetworkClass::Halver)
        throw argument_error("the trade-off search covers sorting and single-exception classes");
    ParetoResult result;
    detail::BudgetClock clock(budget);

    SearchResult depth_opt = optimal_depth(n, cls, Encoding::Dbck, cfg, budget);
    for (const auto& entry : depth_opt.trace)
        result.trace.push_back(entry);
    if (!depth_opt.resolved())
        return result;

    ProblemSpec spec;
    spec.n = n;
    spec.cls = cls;
    spec.encoding = Encoding::Dbck;

    std::optional<int> best_size; // smallest size seen at any shallower depth
    const int max_depth = budget.max_bound.value_or(n);
    for (int d = *depth_opt.optimum; d <= max_depth; ++d) {
        // Witness at this depth, if one is known yet; the depth search
        // supplies one for the first cell.
        std::optional<LayeredNetwork> witness;
        if (d == *depth_opt.optimum)
            witness = depth_opt.witness;
        int cap = witness ? witness->size() - 1
                          : (best_size ? *best_size - 1 : d * (n / 2));
        bool floor_attested = false;

        while (cap >= 0) {
            if (clock.exhausted())
                return result;
            ProblemSpec instance = spec;
            instance.bound = d;
            instance.size_cap = cap;
            SolverConfig instance_cfg = cfg;
            instance_cfg.time_limit_seconds = clock.instance_limit();
            SolveOutcome outcome;
            try {
                outcome = solve_problem(instance, instance_cfg);
            } catch (const solver_error&) {
                outcome.spec = instance;
                outcome.status = SolverStatus::Unknown;
            }
            result.trace.push_back(detail::to_trace(outcome));
            if (outcome.status == SolverStatus::Sat) {
                witness = outcome.witness;
                cap = witness->size() - 1;
            } else if (outcome.status == SolverStatus::Unsat) {
                floor_attested = true;
                break;
            } else {
                return result; // budget ran out mid-cell
            }
        }
        if (cap < 0)
            floor_attested = true; // a zero-comparator witness needs no probe

        if (!floor_attested)
            return result;
        if (!witness) {
            // First probe at best_size-1 came back unsatisfiable: extra
            // depth stopped helping, the frontier is complete.
            result.complete = true;
            return result;
        }
        const int min_size = witness->size();
        if (best_size && min_size >= *best_size) {
            result.complete = true;
            return result;
        }
        result.points.push_back({min_size, d, *witness});
        best_size = min_size;
    }
    return result;
}

} // namespace sortnet
