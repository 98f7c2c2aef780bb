#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace sortnet {

// DIMACS-style literal: the variable id for the positive literal, its
// negation for the complement. Variable ids start at 1.
using Lit = std::int32_t;

constexpr int lit_var(Lit l) { return l < 0 ? -l : l; }
constexpr bool lit_positive(Lit l) { return l > 0; }

// Clause store with flat literal storage. Clauses are append-only; emitters
// never deduplicate or simplify, so counts stay predictable. A separate
// optional pass (see simplify_formula in encodings.hpp) may shrink a
// finished formula.
class CnfFormula {
public:
    int num_vars() const { return num_vars_; }

    void ensure_vars(int n) {
        if (n > num_vars_)
            num_vars_ = n;
    }

    std::size_t clause_count() const { return ends_.size(); }
    std::size_t literal_count() const { return lits_.size(); }

    void add_clause(std::span<const Lit> lits) {
        for (const Lit l : lits) {
            if (l == 0)
                throw argument_error("literal 0 is reserved");
            ensure_vars(lit_var(l));
        }
        lits_.insert(lits_.end(), lits.begin(), lits.end());
        ends_.push_back(lits_.size());
    }

    void add_clause(std::initializer_list<Lit> lits) {
        add_clause(std::span<const Lit>(lits.begin(), lits.size()));
    }

    std::span<const Lit> clause(std::size_t idx) const {
        const std::size_t begin = idx == 0 ? 0 : ends_[idx - 1];
        return {lits_.data() + begin, ends_[idx] - begin};
    }

    bool operator==(const CnfFormula& other) const {
        return num_vars_ == other.num_vars_ && ends_ == other.ends_ && lits_ == other.lits_;
    }

private:
    int num_vars_ = 0;
    std::vector<Lit> lits_;
    std::vector<std::size_t> ends_;
};

// ---------------------------------------------------------------------------
// Variable pool
// ---------------------------------------------------------------------------

// Role of a pooled variable. Key strings use one-letter tags so variable-map
// sidecars stay compact: g = comparator selection, o = reachable output
// vector (fixed size), q = not-yet-sorted vector (fixed size), p/r = the
// sublayer versions of o/q for fixed depth, aux = encoding helper.
enum class VarRole : std::uint8_t {
    Select = 0,      // g(position-or-layer k, i, j)
    Reach = 1,       // o(k, m)
    Unsorted = 2,    // q(k, m)
    SubReach = 3,    // p(k, i, m)
    SubUnsorted = 4, // r(k, i, m)
    Aux = 5,         // aux(group, index)
};

struct VarKey {
    VarRole role = VarRole::Aux;
    std::int32_t k = 0;
    std::int32_t a = 0;
    std::int32_t b = 0;

    static VarKey select(int k, int i, int j) { return {VarRole::Select, k, i, j}; }
    static VarKey reach(int k, std::uint32_t m) {
        return {VarRole::Reach, k, static_cast<std::int32_t>(m), 0};
    }
    static VarKey unsorted(int k, std::uint32_t m) {
        return {VarRole::Unsorted, k, static_cast<std::int32_t>(m), 0};
    }
    static VarKey sub_reach(int k, int i, std::uint32_t m) {
        return {VarRole::SubReach, k, i, static_cast<std::int32_t>(m)};
    }
    static VarKey sub_unsorted(int k, int i, std::uint32_t m) {
        return {VarRole::SubUnsorted, k, i, static_cast<std::int32_t>(m)};
    }
    static VarKey aux(int group, int index) { return {VarRole::Aux, group, index, 0}; }

    std::uint64_t packed() const {
        return (static_cast<std::uint64_t>(role) << 56) |
               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k) & 0xfff) << 44) |
               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a) & 0xfff) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(b));
    }

    std::string str() const {
        const auto tuple2 = [&](const char* tag) {
            return std::string(tag) + "(" + std::to_string(k) + "," + std::to_string(a) + ")";
        };
        const auto tuple3 = [&](const char* tag) {
            return std::string(tag) + "(" + std::to_string(k) + "," + std::to_string(a) + "," +
                   std::to_string(b) + ")";
        };
        switch (role) {
        case VarRole::Select: return tuple3("g");
        case VarRole::Reach: return tuple2("o");
        case VarRole::Unsorted: return tuple2("q");
        case VarRole::SubReach: return tuple3("p");
        case VarRole::SubUnsorted: return tuple3("r");
        case VarRole::Aux: return tuple2("aux");
        }
        return "?";
    }

    friend bool operator==(const VarKey&, const VarKey&) = default;
};

// Injective registry from structured keys to variable ids. Ids are handed
// out in registration order and never reused, so a builder that registers
// keys in a fixed order yields byte-identical formulas across runs.
class VarPool {
public:
    int num_vars() const { return static_cast<int>(keys_.size()); }

    int ensure(VarKey key) {
        const auto [it, inserted] = ids_.try_emplace(key.packed(), num_vars() + 1);
        if (inserted)
            keys_.push_back(key);
        return it->second;
    }

    std::optional<int> find(VarKey key) const {
        const auto it = ids_.find(key.packed());
        if (it == ids_.end())
            return std::nullopt;
        return it->second;
    }

    int at(VarKey key) const {
        const auto id = find(key);
        if (!id)
            throw argument_error("unregistered variable key " + key.str());
        return *id;
    }

    // Reserves a fresh group id for anonymous helper variables.
    int new_aux_group() { return aux_groups_++; }

    int fresh_aux(int group, int index) { return ensure(VarKey::aux(group, index)); }

    // Pads the registry so fresh ids start above `num_vars`. Emitters call
    // this before allocating helpers; a formula may carry variables that
    // were never registered here, and helper ids must not collide with
    // them.
    void align_with(int num_vars) {
        if (this->num_vars() >= num_vars)
            return;
        const int group = new_aux_group();
        int index = 0;
        while (this->num_vars() < num_vars)
            fresh_aux(group, index++);
    }

    const VarKey& key_of(int var) const { return keys_.at(static_cast<std::size_t>(var - 1)); }

    // key string -> id, ordered by key string (stable for sidecar files).
    std::map<std::string, int> registry_view() const {
        std::map<std::string, int> out;
        for (int v = 1; v <= num_vars(); ++v)
            out.emplace(key_of(v).str(), v);
        return out;
    }

private:
    std::unordered_map<std::uint64_t, int> ids_;
    std::vector<VarKey> keys_;
    int aux_groups_ = 0;
};

// ---------------------------------------------------------------------------
// Clause emitters
// ---------------------------------------------------------------------------

// g -> (a <-> b)            for rhs = [b]
// g -> (a <-> b \/ c)       for rhs = [b, c]
// Expanded directly to clauses; the guard is already a literal so no helper
// variables are needed. Emitted verbatim, even if tautological.
inline void guarded_equiv(CnfFormula& f, Lit g, Lit a, std::span<const Lit> rhs) {
    if (rhs.size() == 1) {
        f.add_clause({-g, -a, rhs[0]});
        f.add_clause({-g, a, -rhs[0]});
    } else if (rhs.size() == 2) {
        f.add_clause({-g, -a, rhs[0], rhs[1]});
        f.add_clause({-g, a, -rhs[0]});
        f.add_clause({-g, a, -rhs[1]});
    } else {
        throw argument_error("guarded_equiv takes 1 or 2 right-hand literals");
    }
}

inline void guarded_equiv(CnfFormula& f, Lit g, Lit a, std::initializer_list<Lit> rhs) {
    guarded_equiv(f, g, a, std::span<const Lit>(rhs.begin(), rhs.size()));
}

// g -> u
inline void guarded_unit(CnfFormula& f, Lit g, Lit u) { f.add_clause({-g, u}); }

enum class OneHotMethod { Pairwise, Ladder };

// At most one of vars is true. Pairwise needs no helpers; the ladder method
// allocates k-1 helper variables a_i ("one of vars[0..i] is true") and stays
// linear in k. Both project to the same models over vars.
inline void at_most_one(CnfFormula& f, VarPool& pool, std::span<const Lit> vars,
                        OneHotMethod method = OneHotMethod::Pairwise) {
    const std::size_t k = vars.size();
    if (k <= 1)
        return;
    if (method == OneHotMethod::Pairwise) {
        for (std::size_t x = 0; x < k; ++x)
            for (std::size_t y = x + 1; y < k; ++y)
                f.add_clause({-vars[x], -vars[y]});
        return;
    }
    pool.align_with(f.num_vars());
    const int group = pool.new_aux_group();
    std::vector<Lit> up(k - 1);
    for (std::size_t x = 0; x + 1 < k; ++x)
        up[x] = pool.fresh_aux(group, static_cast<int>(x));
    f.ensure_vars(pool.num_vars());
    f.add_clause({-vars[0], up[0]});
    for (std::size_t x = 1; x + 1 < k; ++x) {
        f.add_clause({-up[x - 1], up[x]});
        f.add_clause({-vars[x], up[x]});
    }
    for (std::size_t x = 1; x < k; ++x)
        f.add_clause({-vars[x], -up[x - 1]});
}

// Exactly one of vars is true.
inline void exactly_one(CnfFormula& f, VarPool& pool, std::span<const Lit> vars,
                        OneHotMethod method = OneHotMethod::Pairwise) {
    if (vars.empty())
        throw argument_error("exactly_one over an empty set");
    at_most_one(f, pool, vars, method);
    f.add_clause(vars);
}

// Sequential-counter bound: at most `bound` of vars may be true. Allocates
// (k-1)*bound helper variables s(x, c) meaning "at least c of the first x
// vars are true".
inline void cardinality_at_most(CnfFormula& f, VarPool& pool, std::span<const Lit> vars,
                                int bound) {
    if (bound < 0)
        throw argument_error("cardinality bound must be >= 0");
    const int k = static_cast<int>(vars.size());
    if (bound == 0) {
        for (const Lit v : vars)
            f.add_clause({-v});
        return;
    }
    if (bound >= k)
        return;

    pool.align_with(f.num_vars());
    const int group = pool.new_aux_group();
    const auto s = [&](int x, int c) -> Lit {
        return pool.fresh_aux(group, (x - 1) * bound + (c - 1));
    };
    // Register helpers in a fixed order before emitting clauses.
    for (int x = 1; x <= k - 1; ++x)
        for (int c = 1; c <= bound; ++c)
            s(x, c);
    f.ensure_vars(pool.num_vars());

    f.add_clause({-vars[0], s(1, 1)});
    for (int c = 2; c <= bound; ++c)
        f.add_clause({-s(1, c)});
    for (int x = 2; x <= k - 1; ++x) {
        f.add_clause({-vars[x - 1], s(x, 1)});
        f.add_clause({-s(x - 1, 1), s(x, 1)});
        for (int c = 2; c <= bound; ++c) {
            f.add_clause({-vars[x - 1], -s(x - 1, c - 1), s(x, c)});
            f.add_clause({-s(x - 1, c), s(x, c)});
        }
        f.add_clause({-vars[x - 1], -s(x - 1, bound)});
    }
    f.add_clause({-vars[k - 1], -s(k - 1, bound)});
}

// ---------------------------------------------------------------------------
// DIMACS
// ---------------------------------------------------------------------------

inline void write_dimacs(const CnfFormula& f, std::ostream& out) {
    out << "p cnf " << f.num_vars() << ' ' << f.clause_count() << '\n';
    char buf[16];
    std::string line;
    for (std::size_t idx = 0; idx < f.clause_count(); ++idx) {
        line.clear();
        for (const Lit l : f.clause(idx)) {
            const auto res = std::to_chars(buf, buf + sizeof buf, l);
            line.append(buf, res.ptr);
            line += ' ';
        }
        line += "0\n";
        out << line;
    }
}

inline std::string write_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    write_dimacs(f, out);
    return out.str();
}

// Reader for DIMACS CNF, used by tests and the round-trip check. Clause and
// literal order are preserved.
inline CnfFormula read_dimacs(std::istream& in) {
    CnfFormula f;
    std::string token;
    bool header_seen = false;
    int declared_vars = 0;
    long long declared_clauses = -1;
    std::vector<Lit> clause;
    while (in >> token) {
        if (token == "c") {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        if (token == "p") {
            std::string fmt;
            if (!(in >> fmt >> declared_vars >> declared_clauses) || fmt != "cnf")
                throw parse_error("bad DIMACS header");
            header_seen = true;
            continue;
        }
        Lit l = 0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), l);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size())
            throw parse_error("bad DIMACS token '" + token + "'");
        if (l == 0) {
            f.add_clause(std::span<const Lit>(clause.data(), clause.size()));
            clause.clear();
        } else {
            clause.push_back(l);
        }
    }
    if (!header_seen)
        throw parse_error("missing DIMACS header");
    if (!clause.empty())
        throw parse_error("unterminated clause in DIMACS input");
    if (declared_clauses >= 0 &&
        static_cast<long long>(f.clause_count()) != declared_clauses)
        throw parse_error("DIMACS clause count mismatch");
    f.ensure_vars(declared_vars);
    return f;
}

// 64-bit FNV-1a over the clause structure; used for content-addressed
// temporary files.
inline std::uint64_t formula_hash(const CnfFormula& f) {
    std::uint64_t h = 1469598103934665603ull;
    const auto mix = [&h](std::uint64_t value) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (value >> (8 * byte)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(f.num_vars()));
    for (std::size_t idx = 0; idx < f.clause_count(); ++idx) {
        for (const Lit l : f.clause(idx))
            mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(l)));
        mix(0x1db);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Solver output
// ---------------------------------------------------------------------------

enum class SolverStatus { Sat, Unsat, Unknown };

inline std::string to_string(SolverStatus s) {
    switch (s) {
    case SolverStatus::Sat: return "SAT";
    case SolverStatus::Unsat: return "UNSAT";
    case SolverStatus::Unknown: return "UNKNOWN";
    }
    return "?";
}

// Verdict plus, for satisfiable results, a complete assignment. model[v] is
// the value of variable v; index 0 is unused.
struct SolverVerdict {
    SolverStatus status = SolverStatus::Unknown;
    std::vector<std::uint8_t> model;

    bool value(int var) const { return model.at(static_cast<std::size_t>(var)) != 0; }
};

// Parses SAT-competition style output: an "s" status line and, for
// satisfiable results, "v" lines listing every variable's literal. A
// satisfiable claim with an incomplete model is rejected.
inline SolverVerdict parse_solver_output(const std::string& text, int num_vars) {
    SolverVerdict verdict;
    std::istringstream in(text);
    std::string line;
    std::vector<std::int8_t> assigned(static_cast<std::size_t>(num_vars) + 1, 0);
    bool status_seen = false;
    while (std::getline(in, line)) {
        if (line.rfind("s ", 0) == 0) {
            const std::string s = line.substr(2);
            status_seen = true;
            if (s.rfind("SATISFIABLE", 0) == 0)
                verdict.status = SolverStatus::Sat;
            else if (s.rfind("UNSATISFIABLE", 0) == 0)
                verdict.status = SolverStatus::Unsat;
            else
                verdict.status = SolverStatus::Unknown;
        } else if (line.rfind("v ", 0) == 0 || line == "v") {
            std::istringstream vals(line.substr(1));
            long long l = 0;
            while (vals >> l) {
                if (l == 0)
                    continue;
                const long long v = l < 0 ? -l : l;
                if (v > num_vars)
                    throw parse_error("solver model mentions unknown variable " +
                                      std::to_string(v));
                assigned[static_cast<std::size_t>(v)] = l > 0 ? 1 : -1;
            }
        }
    }
    if (!status_seen)
        verdict.status = SolverStatus::Unknown;
    if (verdict.status == SolverStatus::Sat) {
        verdict.model.assign(static_cast<std::size_t>(num_vars) + 1, 0);
        for (int v = 1; v <= num_vars; ++v) {
            if (assigned[static_cast<std::size_t>(v)] == 0)
                throw parse_error("satisfiable claim with incomplete model (variable " +
                                  std::to_string(v) + " unassigned)");
            verdict.model[static_cast<std::size_t>(v)] =
                assigned[static_cast<std::size_t>(v)] > 0 ? 1 : 0;
        }
    }
    return verdict;
}

} // namespace sortnet
