#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnf.hpp"
#include "errors.hpp"
#include "network.hpp"
#include "rational.hpp"

namespace sortnet {

// Four families of propositional encodings over comparator-selection
// variables g(k,i,j):
//
//   sfwd  fixed size,  state o(k,m): vector m reachable after comparator k
//   sbck  fixed size,  state q(k,m): vector m not sorted by the suffix after k
//   dfwd  fixed depth, state p(k,i,m): reachability after sublayer i of layer k
//   dbck  fixed depth, state r(k,i,m): suffix-unsorted after sublayer i of layer k
//
// Fixed-depth layers are split into n-1 sublayers; sublayer i may hold only
// the comparator whose smaller channel is i. Boundary levels are materialized
// as variables and pinned with unit clauses, so a formula is a direct
// transcription of the constraint system and unit propagation removes the
// pinned levels at solve time.

enum class Encoding { Sfwd, Sbck, Dfwd, Dbck };

inline std::string to_string(Encoding e) {
    switch (e) {
    case Encoding::Sfwd: return "sfwd";
    case Encoding::Sbck: return "sbck";
    case Encoding::Dfwd: return "dfwd";
    case Encoding::Dbck: return "dbck";
    }
    return "?";
}

inline Encoding encoding_from_string(const std::string& s) {
    if (s == "sfwd")
        return Encoding::Sfwd;
    if (s == "sbck")
        return Encoding::Sbck;
    if (s == "dfwd")
        return Encoding::Dfwd;
    if (s == "dbck")
        return Encoding::Dbck;
    throw argument_error("unknown encoding '" + s + "'");
}

inline bool is_fixed_size(Encoding e) { return e == Encoding::Sfwd || e == Encoding::Sbck; }
inline bool is_forward(Encoding e) { return e == Encoding::Sfwd || e == Encoding::Dfwd; }

// One search instance: which network class, which encoding, and the size or
// depth bound under test.
struct ProblemSpec {
    int n = 0;
    NetworkClass cls = NetworkClass::Sorting;
    Encoding encoding = Encoding::Sfwd;
    int bound = 0; // comparator count for fixed size, layer count for fixed depth
    Rational eps = Rational(0, 1);
    std::optional<int> size_cap;       // fixed depth only
    bool cross_half_only = false;      // halver only
    bool reduced_implications = false; // forward encodings only

    bool fixed_size() const { return is_fixed_size(encoding); }

    void validate() const {
        if (n < 2 || n > VectorSet::kMaxChannels)
            throw argument_error("channel count must be in [2, " +
                                 std::to_string(VectorSet::kMaxChannels) + "]");
        if (bound < 0)
            throw argument_error("size/depth bound must be >= 0");
        switch (cls) {
        case NetworkClass::Sorting:
            break;
        case NetworkClass::SingleException:
            if (is_forward(encoding))
                throw argument_error(
                    "single-exception networks require a backward encoding (sbck or dbck)");
            break;
        case NetworkClass::Halver:
            if (encoding != Encoding::Dfwd)
                throw argument_error("halvers require the dfwd encoding");
            if (n % 2 != 0)
                throw argument_error("halvers require an even channel count");
            break;
        }
        if (size_cap) {
            if (fixed_size())
                throw argument_error("size caps apply to fixed-depth instances only");
            if (*size_cap < 0)
                throw argument_error("size cap must be >= 0");
        }
        if (cross_half_only && cls != NetworkClass::Halver)
            throw argument_error("the cross-half restriction applies to halvers only");
        if (reduced_implications && !is_forward(encoding))
            throw argument_error(
                "reduced implications are only sound for the forward encodings");
    }

    std::string describe() const {
        std::string out = to_string(encoding) + " " + sortnet::to_string(cls) + " n=" +
                          std::to_string(n) + (fixed_size() ? " s=" : " d=") +
                          std::to_string(bound);
        if (cls == NetworkClass::Halver)
            out += " eps=" + eps.str();
        if (size_cap)
            out += " cap=" + std::to_string(*size_cap);
        if (cross_half_only)
            out += " cross-half";
        if (reduced_implications)
            out += " reduced";
        return out;
    }
};

struct EncodingStats {
    std::int64_t select_vars = 0;
    std::int64_t state_vars = 0;
    std::int64_t aux_vars = 0;
    std::int64_t clauses = 0;
};

struct Encoded {
    ProblemSpec spec;
    CnfFormula formula;
    VarPool pool;
    EncodingStats stats;
};

// ---------------------------------------------------------------------------
// Target predicates
// ---------------------------------------------------------------------------

inline VectorSet sorting_invalid_set(int n) {
    VectorSet out(n);
    for (std::uint32_t m = 0; m < out.universe_size(); ++m)
        if (m != sorted_value(m, n))
            out.insert(m);
    return out;
}

// Outputs a depth-encoded halver must never produce: some input with
// p <= n/2 ones would have left too many ones in the top half, or
// symmetrically for zeros. Sorted vectors are never in this set.
inline VectorSet halver_invalid_set(int n, Rational eps) {
    if (n < 2 || n % 2 != 0)
        throw argument_error("halver predicates require an even channel count");
    const int half = n / 2;
    const std::uint32_t low_mask = (std::uint32_t{1} << half) - 1u;
    VectorSet out(n);
    for (std::uint32_t m = 0; m < out.universe_size(); ++m) {
        const int p = std::popcount(m);
        const int z = n - p;
        const bool bad_ones = p <= half && std::popcount(m & low_mask) > eps.floor_scaled(p);
        const bool bad_zeros =
            z <= half && (half - std::popcount(m >> half)) > eps.floor_scaled(z);
        if (bad_ones || bad_zeros)
            out.insert(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

namespace detail {

inline int comparator_pairs(int n) { return n * (n - 1) / 2; }

inline void register_select_vars(int n, int positions, VarPool& pool) {
    for (int k = 1; k <= positions; ++k)
        for (int i = 1; i < n; ++i)
            for (int j = i + 1; j <= n; ++j)
                pool.ensure(VarKey::select(k, i, j));
}

// Comparator effect on a packed vector, used while emitting transitions.
// No argument checks here; callers iterate the full range.
inline std::uint32_t swap_bits(std::uint32_t m, int i, int j) {
    return m ^ ((std::uint32_t{1} << (i - 1)) | (std::uint32_t{1} << (j - 1)));
}

// Emits the three-case forward propagation for comparator (i,j) between two
// state levels addressed by prev/cur. In reduced mode only the implications
// that force reachability forward are kept; that preserves satisfiability
// whenever the level-0 boundary is all-true units and the final boundary is
// negative units, and roughly halves the clause count.
template <typename PrevFn, typename CurFn>
void emit_forward_cases(CnfFormula& f, Lit g, int i, int j, std::uint32_t universe,
                        PrevFn prev, CurFn cur, bool reduced) {
    for (std::uint32_t m = 0; m < universe; ++m) {
        const std::uint32_t bi = (m >> (i - 1)) & 1u;
        const std::uint32_t bj = (m >> (j - 1)) & 1u;
        if (bi == 0u && bj == 1u) {
            // m is the image of the swapped preimage w (and of itself).
            const std::uint32_t w = swap_bits(m, i, j);
            if (reduced) {
                f.add_clause({-g, -prev(m), cur(m)});
                f.add_clause({-g, -prev(w), cur(m)});
            } else {
                guarded_equiv(f, g, cur(m), {prev(m), prev(w)});
            }
        } else if (bi == bj) {
            // fixed point with no other preimage
            if (reduced)
                f.add_clause({-g, -prev(m), cur(m)});
            else
                guarded_equiv(f, g, cur(m), {prev(m)});
        } else {
            // m cannot appear after this comparator
            if (!reduced)
                guarded_unit(f, g, -cur(m));
        }
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Fixed-size constraints
// ---------------------------------------------------------------------------

// One comparator per position: a one-hot over the C(n,2) selection variables
// of each position.
inline void valid_size_constraints(int n, int s, VarPool& pool, CnfFormula& f) {
    detail::register_select_vars(n, s, pool);
    f.ensure_vars(pool.num_vars());
    std::vector<Lit> vars;
    for (int k = 1; k <= s; ++k) {
        vars.clear();
        for (int i = 1; i < n; ++i)
            for (int j = i + 1; j <= n; ++j)
                vars.push_back(pool.at(VarKey::select(k, i, j)));
        exactly_one(f, pool, vars, OneHotMethod::Pairwise);
    }
}

// Reachable-vector propagation o(k-1,.) -> o(k,.) for each position and
// comparator choice.
inline void forward_size_constraints(int n, int s, VarPool& pool, CnfFormula& f,
                                     bool reduced = false) {
    detail::register_select_vars(n, s, pool);
    const std::uint32_t universe = std::uint32_t{1} << n;
    for (int k = 0; k <= s; ++k)
        for (std::uint32_t m = 0; m < universe; ++m)
            pool.ensure(VarKey::reach(k, m));
    f.ensure_vars(pool.num_vars());

    for (int k = 1; k <= s; ++k) {
        const auto prev = [&](std::uint32_t m) { return pool.at(VarKey::reach(k - 1, m)); };
        const auto cur = [&](std::uint32_t m) { return pool.at(VarKey::reach(k, m)); };
        for (int i = 1; i < n; ++i)
            for (int j = i + 1; j <= n; ++j)
                detail::emit_forward_cases(f, pool.at(VarKey::select(k, i, j)), i, j, universe,
                                           prev, cur, reduced);
    }
}

// Suffix-unsorted propagation: q(k-1, m) <-> q(k, c(m)) under g(k,i,j).
inline void backward_size_constraints(int n, int s, VarPool& pool, CnfFormula& f) {
    detail::register_select_vars(n, s, pool);
    const std::uint32_t universe = std::uint32_t{1} << n;
    for (int k = 0; k <= s; ++k)
        for (std::uint32_t m = 0; m < universe; ++m)
            pool.ensure(VarKey::unsorted(k, m));
    f.ensure_vars(pool.num_vars());

    for (int k = 1; k <= s; ++k) {
        for (int i = 1; i < n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                const Lit g = pool.at(VarKey::select(k, i, j));
                for (std::uint32_t m = 0; m < universe; ++m) {
                    const std::uint32_t bi = (m >> (i - 1)) & 1u;
                    const std::uint32_t bj = (m >> (j - 1)) & 1u;
                    const std::uint32_t w =
                        (bi == 1u && bj == 0u) ? detail::swap_bits(m, i, j) : m;
                    guarded_equiv(f, g, pool.at(VarKey::unsorted(k - 1, m)),
                                  {pool.at(VarKey::unsorted(k, w))});
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Fixed-depth constraints
// ---------------------------------------------------------------------------

// Layers are sets of independent comparators: at most one selected
// comparator may touch each channel of each layer. Empty layers are valid.
inline void valid_depth_constraints(int n, int d, VarPool& pool, CnfFormula& f) {
    detail::register_select_vars(n, d, pool);
    f.ensure_vars(pool.num_vars());
    std::vector<Lit> touching;
    for (int k = 1; k <= d; ++k) {
        for (int ch = 1; ch <= n; ++ch) {
            touching.clear();
            for (int i = 1; i < n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    if (i == ch || j == ch)
                        touching.push_back(pool.at(VarKey::select(k, i, j)));
            at_most_one(f, pool, touching, OneHotMethod::Pairwise);
        }
    }
}

namespace detail {

// State levels of the fixed-depth encodings: the input level (0, n-1)
// followed by every (layer, sublayer) pair.
inline void register_sublayer_state(VarRole role, int n, int d, VarPool& pool) {
    const std::uint32_t universe = std::uint32_t{1} << n;
    const auto key = [&](int k, int i, std::uint32_t m) {
        return role == VarRole::SubReach ? VarKey::sub_reach(k, i, m)
                                         : VarKey::sub_unsorted(k, i, m);
    };
    for (std::uint32_t m = 0; m < universe; ++m)
        pool.ensure(key(0, n - 1, m));
    for (int k = 1; k <= d; ++k)
        for (int i = 1; i < n; ++i)
            for (std::uint32_t m = 0; m < universe; ++m)
                pool.ensure(key(k, i, m));
}

} // namespace detail

// Sublayer-by-sublayer reachability. Sublayer i of layer k either carries
// the comparator (i,j) whose selection variable is true, or copies the
// previous level when no g(k,i,.) is set.
inline void forward_depth_constraints(int n, int d, VarPool& pool, CnfFormula& f,
                                      bool reduced = false) {
    detail::register_select_vars(n, d, pool);
    detail::register_sublayer_state(VarRole::SubReach, n, d, pool);
    f.ensure_vars(pool.num_vars());
    const std::uint32_t universe = std::uint32_t{1} << n;

    for (int k = 1; k <= d; ++k) {
        for (int i = 1; i < n; ++i) {
            const auto prev = [&](std::uint32_t m) {
                return i == 1 ? pool.at(VarKey::sub_reach(k - 1, n - 1, m))
                              : pool.at(VarKey::sub_reach(k, i - 1, m));
            };
            const auto cur = [&](std::uint32_t m) { return pool.at(VarKey::sub_reach(k, i, m)); };

            std::vector<Lit> sublayer;
            for (int j = i + 1; j <= n; ++j)
                sublayer.push_back(pool.at(VarKey::select(k, i, j)));

            // Empty sublayer: copy the previous level. The selection
            // disjunction guards the copy directly (no helper variable).
            std::vector<Lit> clause;
            for (std::uint32_t m = 0; m < universe; ++m) {
                clause = sublayer;
                clause.push_back(-prev(m));
                clause.push_back(cur(m));
                f.add_clause(clause);
                if (!reduced) {
                    clause = sublayer;
                    clause.push_back(prev(m));
                    clause.push_back(-cur(m));
                    f.add_clause(clause);
                }
            }

            for (int j = i + 1; j <= n; ++j)
                detail::emit_forward_cases(f, pool.at(VarKey::select(k, i, j)), i, j, universe,
                                           prev, cur, reduced);
        }
    }
}

// Backward counterpart: prev(m) <-> cur(c(m)) on occupied sublayers, levels
// equated on empty ones. Always a full biconditional; the single-exception
// boundary needs both directions.
inline void backward_depth_constraints(int n, int d, VarPool& pool, CnfFormula& f) {
    detail::register_select_vars(n, d, pool);
    detail::register_sublayer_state(VarRole::SubUnsorted, n, d, pool);
    f.ensure_vars(pool.num_vars());
    const std::uint32_t universe = std::uint32_t{1} << n;

    for (int k = 1; k <= d; ++k) {
        for (int i = 1; i < n; ++i) {
            const auto prev = [&](std::uint32_t m) {
                return i == 1 ? pool.at(VarKey::sub_unsorted(k - 1, n - 1, m))
                              : pool.at(VarKey::sub_unsorted(k, i - 1, m));
            };
            const auto cur = [&](std::uint32_t m) {
                return pool.at(VarKey::sub_unsorted(k, i, m));
            };

            std::vector<Lit> sublayer;
            for (int j = i + 1; j <= n; ++j)
                sublayer.push_back(pool.at(VarKey::select(k, i, j)));

            std::vector<Lit> clause;
            for (std::uint32_t m = 0; m < universe; ++m) {
                clause = sublayer;
                clause.push_back(-prev(m));
                clause.push_back(cur(m));
                f.add_clause(clause);
                clause = sublayer;
                clause.push_back(prev(m));
                clause.push_back(-cur(m));
                f.add_clause(clause);
            }

            for (int j = i + 1; j <= n; ++j) {
                const Lit g = pool.at(VarKey::select(k, i, j));
                for (std::uint32_t m = 0; m < universe; ++m) {
                    const std::uint32_t bi = (m >> (i - 1)) & 1u;
                    const std::uint32_t bj = (m >> (j - 1)) & 1u;
                    const std::uint32_t w =
                        (bi == 1u && bj == 0u) ? detail::swap_bits(m, i, j) : m;
                    guarded_equiv(f, g, prev(m), {cur(w)});
                }
            }
        }
    }
}

// Halver variant restriction: forbid every comparator that stays within one
// half of the channels.
inline void cross_half_restriction(int n, int d, VarPool& pool, CnfFormula& f) {
    if (n % 2 != 0)
        throw argument_error("the cross-half restriction requires an even channel count");
    const int half = n / 2;
    for (int k = 1; k <= d; ++k)
        for (int i = 1; i < n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if ((i <= half) == (j <= half))
                    f.add_clause({-pool.at(VarKey::select(k, i, j))});
}

// Joint optimization: bound the total number of selected comparators.
inline void size_cap_constraints(int n, int d, int cap, VarPool& pool, CnfFormula& f) {
    std::vector<Lit> all;
    for (int k = 1; k <= d; ++k)
        for (int i = 1; i < n; ++i)
            for (int j = i + 1; j <= n; ++j)
                all.push_back(pool.at(VarKey::select(k, i, j)));
    cardinality_at_most(f, pool, all, cap);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace detail {

inline EncodingStats finish_stats(const ProblemSpec& spec, const VarPool& pool,
                                  const CnfFormula& f) {
    EncodingStats stats;
    const int n = spec.n;
    stats.select_vars = std::int64_t{comparator_pairs(n)} * spec.bound;
    const std::int64_t universe = std::int64_t{1} << n;
    stats.state_vars = spec.fixed_size() ? (spec.bound + 1) * universe
                                         : (std::int64_t{spec.bound} * (n - 1) + 1) * universe;
    stats.aux_vars = pool.num_vars() - stats.select_vars - stats.state_vars;
    stats.clauses = static_cast<std::int64_t>(f.clause_count());
    return stats;
}

} // namespace detail

// Size-s sorting network exists iff satisfiable: reachability from all 2^n
// inputs with no unsorted vector reachable at the end.
inline Encoded build_sfwd(const ProblemSpec& spec) {
    spec.validate();
    if (spec.encoding != Encoding::Sfwd || spec.cls != NetworkClass::Sorting)
        throw argument_error("sfwd builds fixed-size sorting instances");
    Encoded enc{spec, {}, {}, {}};
    const int n = spec.n;
    const int s = spec.bound;
    const std::uint32_t universe = std::uint32_t{1} << n;

    valid_size_constraints(n, s, enc.pool, enc.formula);
    forward_size_constraints(n, s, enc.pool, enc.formula, spec.reduced_implications);
    for (std::uint32_t m = 0; m < universe; ++m)
        enc.formula.add_clause({enc.pool.at(VarKey::reach(0, m))});
    for (std::uint32_t m = 0; m < universe; ++m)
        if (m != sorted_value(m, n))
            enc.formula.add_clause({-enc.pool.at(VarKey::reach(s, m))});

    enc.stats = detail::finish_stats(spec, enc.pool, enc.formula);
    return enc;
}

namespace detail {

// Shared by the sbck sorting and single-exception builders; they differ only
// in the input-side boundary.
inline Encoded build_backward_size(const ProblemSpec& spec, bool single_exception) {
    Encoded enc{spec, {}, {}, {}};
    const int n = spec.n;
    const int s = spec.bound;
    const std::uint32_t universe = std::uint32_t{1} << n;

    valid_size_constraints(n, s, enc.pool, enc.formula);
    backward_size_constraints(n, s, enc.pool, enc.formula);
    for (std::uint32_t m = 0; m < universe; ++m) {
        const Lit q = enc.pool.at(VarKey::unsorted(s, m));
        enc.formula.add_clause({m != sorted_value(m, n) ? q : -q});
    }
    if (single_exception) {
        std::vector<Lit> inputs;
        inputs.reserve(universe);
        for (std::uint32_t m = 0; m < universe; ++m)
            inputs.push_back(enc.pool.at(VarKey::unsorted(0, m)));
        exactly_one(enc.formula, enc.pool, inputs, OneHotMethod::Ladder);
    } else {
        for (std::uint32_t m = 0; m < universe; ++m)
            enc.formula.add_clause({-enc.pool.at(VarKey::unsorted(0, m))});
    }

    enc.stats = finish_stats(spec, enc.pool, enc.formula);
    return enc;
}

} // namespace detail

inline Encoded build_sbck(const ProblemSpec& spec) {
    spec.validate();
    if (spec.encoding != Encoding::Sbck || spec.cls != NetworkClass::Sorting)
        throw argument_error("sbck builds fixed-size sorting instances");
    return detail::build_backward_size(spec, false);
}

// Fixed-size single-exception instance: exactly one input stays unsorted.
inline Encoded build_single_size(const ProblemSpec& spec) {
    spec.validate();
    if (spec.encoding != Encoding::Sbck || spec.cls != NetworkClass::SingleException)
        throw argument_error("fixed-size single-exception instances use sbck");
    return detail::build_backward_size(spec, true);
}

// Depth-d instance of a class defined by forbidden outputs (sorting or
// halver): reachability with the invalid set excluded at the last level.
inline Encoded build_dfwd(const ProblemSpec& spec) {
    spec.validate();
    if (spec.encoding != Encoding::Dfwd)
        throw argument_error("dfwd builds fixed-depth instances");
    Encoded enc{spec, {}, {}, {}};
    const int n = spec.n;
    const int d = spec.bound;
    const std::uint32_t universe = std::uint32_t{1} << n;

    valid_depth_constraints(n, d, enc.pool, enc.formula);
    if (spec.cross_half_only)
        cross_half_restriction(n, d, enc.pool, enc.formula);
    forward_depth_constraints(n, d, enc.pool, enc.formula, spec.reduced_implications);

    for (std::uint32_t m = 0; m < universe; ++m)
        enc.formula.add_clause({enc.pool.at(VarKey::sub_reach(0, n - 1, m))});
    const VectorSet invalid = spec.cls == NetworkClass::Halver
                                  ? halver_invalid_set(n, spec.eps)
                                  : sorting_invalid_set(n);
    for (std::uint32_t m = 0; m < universe; ++m)
        if (invalid.contains(m))
            enc.formula.add_clause({-enc.pool.at(VarKey::sub_reach(d, n - 1, m))});

    if (spec.size_cap)
        size_cap_constraints(n, d, *spec.size_cap, enc.pool, enc.formula);

    enc.stats = detail::finish_stats(spec, enc.pool, enc.formula);
    return enc;
}

namespace detail {

inline Encoded build_backward_depth(const ProblemSpec& spec, bool single_exception) {
    Encoded enc{spec, {}, {}, {}};
    const int n = spec.n;
    const int d = spec.bound;
    const std::uint32_t universe = std::uint32_t{1} << n;

    valid_depth_constraints(n, d, enc.pool, enc.formula);
    backward_depth_constraints(n, d, enc.pool, enc.formula);

    for (std::uint32_t m = 0; m < universe; ++m) {
        const Lit r = enc.pool.at(VarKey::sub_unsorted(d, n - 1, m));
        enc.formula.add_clause({m != sorted_value(m, n) ? r : -r});
    }
    if (single_exception) {
        std::vector<Lit> inputs;
        inputs.reserve(universe);
        for (std::uint32_t m = 0; m < universe; ++m)
            inputs.push_back(enc.pool.at(VarKey::sub_unsorted(0, n - 1, m)));
        exactly_one(enc.formula, enc.pool, inputs, OneHotMethod::Ladder);
    } else {
        for (std::uint32_t m = 0; m < universe; ++m)
            enc.formula.add_clause({-enc.pool.at(VarKey::sub_unsorted(0, n - 1, m))});
    }
    if (spec.size_cap)
        size_cap_constraints(n, d, *spec.size_cap, enc.pool, enc.formula);

    enc.stats = finish_stats(spec, enc.pool, enc.formula);
    return enc;
}

} // namespace detail

inline Encoded build_dbck(const ProblemSpec& spec) {
    spec.validate();
    if (spec.encoding != Encoding::Dbck || spec.cls != NetworkClass::Sorting)
        throw argument_error("dbck builds fixed-depth sorting instances");
    return detail::build_backward_depth(spec, false);
}

inline Encoded build_single_depth(const ProblemSpec& spec) {
    spec.validate();
    if (spec.encoding != Encoding::Dbck || spec.cls != NetworkClass::SingleException)
        throw argument_error("fixed-depth single-exception instances use dbck");
    return detail::build_backward_depth(spec, true);
}

// Builds the formula matching spec.encoding and spec.cls.
inline Encoded build(const ProblemSpec& spec) {
    spec.validate();
    switch (spec.encoding) {
    case Encoding::Sfwd:
        return build_sfwd(spec);
    case Encoding::Sbck:
        return spec.cls == NetworkClass::SingleException ? build_single_size(spec)
                                                         : build_sbck(spec);
    case Encoding::Dfwd:
        return build_dfwd(spec);
    case Encoding::Dbck:
        return spec.cls == NetworkClass::SingleException ? build_single_depth(spec)
                                                         : build_dbck(spec);
    }
    throw argument_error("unknown encoding");
}

// ---------------------------------------------------------------------------
// Optional cleanup pass
// ---------------------------------------------------------------------------

// Unit-propagates a formula and drops satisfied clauses and false literals.
// Emitters never do this themselves; counts of freshly built formulas stay
// predictable. Returns a single empty clause if propagation hits a conflict.
inline CnfFormula simplify_formula(const CnfFormula& f) {
    std::vector<std::int8_t> fixed(static_cast<std::size_t>(f.num_vars()) + 1, 0);
    bool changed = true;
    bool conflict = false;
    std::vector<std::size_t> pending(f.clause_count());
    for (std::size_t idx = 0; idx < pending.size(); ++idx)
        pending[idx] = idx;
    while (changed && !conflict) {
        changed = false;
        for (const std::size_t idx : pending) {
            Lit unit = 0;
            int unassigned = 0;
            bool satisfied = false;
            for (const Lit l : f.clause(idx)) {
                const std::int8_t v = fixed[static_cast<std::size_t>(lit_var(l))];
                if (v == 0) {
                    ++unassigned;
                    unit = l;
                } else if ((v > 0) == lit_positive(l)) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied)
                continue;
            if (unassigned == 0) {
                conflict = true;
                break;
            }
            if (unassigned == 1) {
                const std::int8_t want = lit_positive(unit) ? 1 : -1;
                auto& slot = fixed[static_cast<std::size_t>(lit_var(unit))];
                if (slot == 0) {
                    slot = want;
                    changed = true;
                } else if (slot != want) {
                    conflict = true;
                    break;
                }
            }
        }
    }

    CnfFormula out;
    out.ensure_vars(f.num_vars());
    if (conflict) {
        out.add_clause(std::span<const Lit>{});
        return out;
    }
    std::vector<Lit> kept;
    for (std::size_t idx = 0; idx < f.clause_count(); ++idx) {
        kept.clear();
        bool satisfied = false;
        for (const Lit l : f.clause(idx)) {
            const std::int8_t v = fixed[static_cast<std::size_t>(lit_var(l))];
            if (v == 0)
                kept.push_back(l);
            else if ((v > 0) == lit_positive(l))
                satisfied = true;
        }
        if (!satisfied && !kept.empty())
            out.add_clause(kept);
    }
    for (int v = 1; v <= f.num_vars(); ++v)
        if (fixed[static_cast<std::size_t>(v)] != 0)
            out.add_clause({fixed[static_cast<std::size_t>(v)] > 0 ? v : -v});
    return out;
}

} // namespace sortnet
