#pragma once

// Test-only oracles, deliberately independent of the library's bit-packed
// evaluation and of the SAT path:
//  * per-channel array simulation of a network
//  * exhaustive enumeration of comparator sequences
//  * truth-table satisfiability for small formulas

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "sortnet/cnf.hpp"
#include "sortnet/network.hpp"

namespace oracle {

// Simulates the network on explicit per-channel values (channel c at index
// c-1) with min/max semantics.
inline std::vector<int> simulate(const sortnet::LayeredNetwork& net, std::vector<int> values) {
    for (const auto& layer : net.layers()) {
        for (const auto c : layer) {
            int& lo = values[static_cast<std::size_t>(c.i - 1)];
            int& hi = values[static_cast<std::size_t>(c.j - 1)];
            if (lo > hi)
                std::swap(lo, hi);
        }
    }
    return values;
}

inline std::vector<int> unpack(std::uint32_t m, int n) {
    std::vector<int> values(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c)
        values[static_cast<std::size_t>(c)] = static_cast<int>((m >> c) & 1u);
    return values;
}

inline std::uint32_t pack(const std::vector<int>& values) {
    std::uint32_t m = 0;
    for (std::size_t c = 0; c < values.size(); ++c)
        if (values[c])
            m |= std::uint32_t{1} << c;
    return m;
}

inline bool sorts_all_binary_inputs(const sortnet::LayeredNetwork& net) {
    const int n = net.channels();
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
        std::vector<int> out = simulate(net, unpack(m, n));
        if (!std::is_sorted(out.begin(), out.end()))
            return false;
    }
    return true;
}

inline std::vector<sortnet::Comparator> all_comparators(int n) {
    std::vector<sortnet::Comparator> out;
    for (int i = 1; i < n; ++i)
        for (int j = i + 1; j <= n; ++j)
            out.push_back({i, j});
    return out;
}

// Visits every sequence of exactly `length` comparators on n channels.
inline void for_each_sequence(int n, int length,
                              const std::function<void(const std::vector<sortnet::Comparator>&)>& visit) {
    const auto comparators = all_comparators(n);
    std::vector<sortnet::Comparator> seq(static_cast<std::size_t>(length));
    const std::function<void(int)> recurse = [&](int pos) {
        if (pos == length) {
            visit(seq);
            return;
        }
        for (const auto c : comparators) {
            seq[static_cast<std::size_t>(pos)] = c;
            recurse(pos + 1);
        }
    };
    recurse(0);
}

// Does any sequence of exactly `length` comparators sort all binary inputs?
inline bool sorting_sequence_exists(int n, int length) {
    bool found = false;
    for_each_sequence(n, length, [&](const std::vector<sortnet::Comparator>& seq) {
        if (found)
            return;
        if (sorts_all_binary_inputs(sortnet::LayeredNetwork::sequential(n, seq)))
            found = true;
    });
    return found;
}

// Truth-table satisfiability; only sensible for num_vars <= ~22.
inline bool truth_table_satisfiable(const sortnet::CnfFormula& f) {
    const int n = f.num_vars();
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        bool all = true;
        for (std::size_t idx = 0; idx < f.clause_count() && all; ++idx) {
            bool clause_sat = false;
            for (const sortnet::Lit l : f.clause(idx)) {
                const bool value = (bits >> (sortnet::lit_var(l) - 1)) & 1u;
                if (value == sortnet::lit_positive(l)) {
                    clause_sat = true;
                    break;
                }
            }
            all = clause_sat;
        }
        if (all)
            return true;
    }
    return f.clause_count() == 0;
}

// The set of assignments to `inputs` that extend to a model of f, assuming
// every other variable of f is a helper. Brute force over everything.
inline std::vector<std::uint32_t> satisfiable_projections(const sortnet::CnfFormula& f,
                                                          const std::vector<int>& inputs) {
    std::vector<std::uint32_t> out;
    const int n = f.num_vars();
    std::vector<char> seen(std::size_t{1} << inputs.size(), 0);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        bool all = true;
        for (std::size_t idx = 0; idx < f.clause_count() && all; ++idx) {
            bool clause_sat = false;
            for (const sortnet::Lit l : f.clause(idx)) {
                const bool value = (bits >> (sortnet::lit_var(l) - 1)) & 1u;
                if (value == sortnet::lit_positive(l)) {
                    clause_sat = true;
                    break;
                }
            }
            all = clause_sat;
        }
        if (!all)
            continue;
        std::uint32_t proj = 0;
        for (std::size_t x = 0; x < inputs.size(); ++x)
            if ((bits >> (inputs[x] - 1)) & 1u)
                proj |= std::uint32_t{1} << x;
        if (!seen[proj]) {
            seen[proj] = 1;
            out.push_back(proj);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace oracle
