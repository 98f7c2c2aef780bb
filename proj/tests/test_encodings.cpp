#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "sortnet/encodings.hpp"
#include "sortnet/network_json.hpp"
#include "sortnet/solver.hpp"

#include "oracle.hpp"

using namespace sortnet;

namespace {

const std::filesystem::path kNetworksDir{SORTNET_NETWORKS_DIR};

ProblemSpec make(int n, NetworkClass cls, Encoding enc, int bound) {
    ProblemSpec spec;
    spec.n = n;
    spec.cls = cls;
    spec.encoding = enc;
    spec.bound = bound;
    return spec;
}

SolverStatus status_of(const ProblemSpec& spec) {
    Encoded enc = build(spec);
    SolverConfig cfg;
    cfg.embedded_clause_cap = 0; // uncapped in tests
    return solve(enc.formula, cfg).status;
}

} // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(make(1, NetworkClass::Sorting, Encoding::Sfwd, 1).validate(),
                    argument_error);
    CHECK_THROWS_AS(make(4, NetworkClass::SingleException, Encoding::Sfwd, 1).validate(),
                    argument_error);
    CHECK_THROWS_AS(make(4, NetworkClass::Halver, Encoding::Dbck, 1).validate(),
                    argument_error);
    CHECK_THROWS_AS(make(5, NetworkClass::Halver, Encoding::Dfwd, 1).validate(),
                    argument_error); // odd n
    {
        auto spec = make(4, NetworkClass::Sorting, Encoding::Sfwd, 2);
        spec.size_cap = 3; // caps are a fixed-depth feature
        CHECK_THROWS_AS(spec.validate(), argument_error);
    }
    {
        auto spec = make(4, NetworkClass::Sorting, Encoding::Dfwd, 2);
        spec.cross_half_only = true; // halver-only restriction
        CHECK_THROWS_AS(spec.validate(), argument_error);
    }
    {
        auto spec = make(4, NetworkClass::Sorting, Encoding::Sbck, 2);
        spec.reduced_implications = true; // backward encodings need both directions
        CHECK_THROWS_AS(spec.validate(), argument_error);
    }
    CHECK_NOTHROW(make(4, NetworkClass::Halver, Encoding::Dfwd, 2).validate());
    CHECK_NOTHROW(make(4, NetworkClass::Sorting, Encoding::Dbck, 0).validate());
}

TEST_CASE("valid_size: one-hot per position") {
    {
        VarPool pool;
        CnfFormula f;
        valid_size_constraints(2, 1, pool, f);
        CHECK(pool.num_vars() == 1);
        CHECK(f.clause_count() == 1); // the unit at-least-one
    }
    {
        VarPool pool;
        CnfFormula f;
        valid_size_constraints(3, 1, pool, f);
        CHECK(pool.num_vars() == 3);
        CHECK(f.clause_count() == 4); // 3 at-most-one pairs + 1
    }
    {
        VarPool pool;
        CnfFormula f;
        valid_size_constraints(4, 2, pool, f);
        CHECK(pool.num_vars() == 12); // independent one-hots per position
        CHECK(f.clause_count() == 2 * (15 + 1));
    }
}

TEST_CASE("forward_size: case analysis at n=2") {
    VarPool pool;
    CnfFormula f;
    valid_size_constraints(2, 1, pool, f);
    const std::size_t valid_clauses = f.clause_count();
    forward_size_constraints(2, 1, pool, f);
    // m=0 and m=3 keep their value (2 clauses each), m=2 absorbs the swap
    // preimage w=1 (3 clauses), m=1 can no longer appear (1 clause).
    CHECK(f.clause_count() - valid_clauses == 2 + 2 + 3 + 1);
    CHECK(pool.num_vars() == 1 + 8); // g plus (s+1) * 2^n state vars
}

TEST_CASE("forward_size: propagation computes the image set") {
    // Fix a comparator, assert all inputs, and let unit propagation alone
    // determine level 1. It must equal the brute-force image.
    for (int i = 1; i < 3; ++i) {
        for (int j = i + 1; j <= 3; ++j) {
            VarPool pool;
            CnfFormula f;
            valid_size_constraints(3, 1, pool, f);
            forward_size_constraints(3, 1, pool, f);
            for (std::uint32_t m = 0; m < 8; ++m)
                f.add_clause({pool.at(VarKey::reach(0, m))});
            f.add_clause({pool.at(VarKey::select(1, i, j))});

            CdclSolver solver(f);
            const auto implied = solver.root_implied();
            REQUIRE(implied.has_value());
            std::map<int, bool> forced;
            for (const Lit l : *implied)
                forced[lit_var(l)] = lit_positive(l);

            const VectorSet image =
                outputs_set(LayeredNetwork(3, {{{i, j}}}));
            for (std::uint32_t m = 0; m < 8; ++m) {
                const int var = pool.at(VarKey::reach(1, m));
                REQUIRE(forced.count(var));
                CHECK(forced[var] == image.contains(m));
            }
        }
    }
}

TEST_CASE("build_sfwd: smallest instances") {
    {
        ProblemSpec spec = make(2, NetworkClass::Sorting, Encoding::Sfwd, 1);
        Encoded enc = build(spec);
        SolverConfig cfg;
        const SolverVerdict verdict = solve(enc.formula, cfg);
        REQUIRE(verdict.status == SolverStatus::Sat);
        const LayeredNetwork net = decode_network(verdict, enc.pool, spec);
        CHECK(net.layers()[0][0] == Comparator{1, 2});
    }
    // s=0 on n>=2 is a legal, trivially unsatisfiable formula.
    CHECK(status_of(make(2, NetworkClass::Sorting, Encoding::Sfwd, 0)) == SolverStatus::Unsat);
    CHECK(status_of(make(4, NetworkClass::Sorting, Encoding::Sfwd, 4)) == SolverStatus::Unsat);
    CHECK(status_of(make(4, NetworkClass::Sorting, Encoding::Sfwd, 5)) == SolverStatus::Sat);
}

TEST_CASE("backward_size: propagation reproduces the not-sorted set") {
    // For every comparator sequence with up to 3 comparators on 3 channels,
    // pin the network and the output boundary; propagation at level 0 must
    // reproduce notsorted_set exactly.
    for (int s = 0; s <= 3; ++s) {
        oracle::for_each_sequence(3, s, [&](const std::vector<Comparator>& seq) {
            VarPool pool;
            CnfFormula f;
            valid_size_constraints(3, s, pool, f);
            backward_size_constraints(3, s, pool, f);
            for (std::uint32_t m = 0; m < 8; ++m) {
                const Lit q = pool.at(VarKey::unsorted(s, m));
                f.add_clause({m != sorted_value(m, 3) ? q : -q});
            }
            for (int k = 1; k <= s; ++k)
                f.add_clause({pool.at(
                    VarKey::select(k, seq[static_cast<std::size_t>(k - 1)].i,
                                   seq[static_cast<std::size_t>(k - 1)].j))});

            CdclSolver solver(f);
            const auto implied = solver.root_implied();
            REQUIRE(implied.has_value());
            std::map<int, bool> forced;
            for (const Lit l : *implied)
                forced[lit_var(l)] = lit_positive(l);

            const VectorSet bad = notsorted_set(LayeredNetwork::sequential(3, seq));
            for (std::uint32_t m = 0; m < 8; ++m) {
                const int var = pool.at(VarKey::unsorted(0, m));
                REQUIRE(forced.count(var));
                CHECK(forced[var] == bad.contains(m));
            }
        });
    }
}

TEST_CASE("build_sbck: smallest instances") {
    ProblemSpec spec = make(2, NetworkClass::Sorting, Encoding::Sbck, 1);
    Encoded enc = build(spec);
    SolverConfig cfg;
    const SolverVerdict verdict = solve(enc.formula, cfg);
    REQUIRE(verdict.status == SolverStatus::Sat);
    CHECK(decode_network(verdict, enc.pool, spec).layers()[0][0] == Comparator{1, 2});
    CHECK(status_of(make(2, NetworkClass::Sorting, Encoding::Sbck, 0)) == SolverStatus::Unsat);
}

TEST_CASE("build_single_size: the empty network has exactly one exception") {
    ProblemSpec spec = make(2, NetworkClass::SingleException, Encoding::Sbck, 0);
    Encoded enc = build(spec);
    SolverConfig cfg;
    const SolverVerdict verdict = solve(enc.formula, cfg);
    REQUIRE(verdict.status == SolverStatus::Sat);
    CHECK(verdict.value(enc.pool.at(VarKey::unsorted(0, 1))));
    for (const std::uint32_t m : {0u, 2u, 3u})
        CHECK(!verdict.value(enc.pool.at(VarKey::unsorted(0, m))));

    // Exactly one unsorted input is stricter than sorting: n=2 needs s=1 to
    // sort but s=0 suffices for a single exception.
    CHECK(status_of(make(3, NetworkClass::SingleException, Encoding::Sbck, 1)) ==
          SolverStatus::Unsat);
    CHECK(status_of(make(3, NetworkClass::SingleException, Encoding::Sbck, 2)) ==
          SolverStatus::Sat);
}

TEST_CASE("valid_depth: channel-disjointness per layer") {
    VarPool pool;
    CnfFormula f;
    valid_depth_constraints(3, 1, pool, f);
    CHECK(pool.num_vars() == 3);
    CHECK(f.clause_count() == 3); // one at-most-one pair per channel

    // (1,2) and (3,4) may share a layer; (1,2) and (2,3) may not.
    VarPool pool4;
    CnfFormula f4;
    valid_depth_constraints(4, 1, pool4, f4);
    {
        CnfFormula good = f4;
        good.add_clause({pool4.at(VarKey::select(1, 1, 2))});
        good.add_clause({pool4.at(VarKey::select(1, 3, 4))});
        CHECK(CdclSolver(good).solve() == SolverStatus::Sat);
    }
    {
        CnfFormula bad = f4;
        bad.add_clause({pool4.at(VarKey::select(1, 1, 2))});
        bad.add_clause({pool4.at(VarKey::select(1, 2, 3))});
        CHECK(CdclSolver(bad).solve() == SolverStatus::Unsat);
    }
    {
        // the all-false layer stays valid
        CnfFormula empty = f4;
        for (int i = 1; i < 4; ++i)
            for (int j = i + 1; j <= 4; ++j)
                empty.add_clause({-pool4.at(VarKey::select(1, i, j))});
        CHECK(CdclSolver(empty).solve() == SolverStatus::Sat);
    }
}

TEST_CASE("build_dfwd: sorting at small depth") {
    {
        ProblemSpec spec = make(2, NetworkClass::Sorting, Encoding::Dfwd, 1);
        Encoded enc = build(spec);
        SolverConfig cfg;
        const SolverVerdict verdict = solve(enc.formula, cfg);
        REQUIRE(verdict.status == SolverStatus::Sat);
        CHECK(verdict.value(enc.pool.at(VarKey::select(1, 1, 2))));
    }
    CHECK(status_of(make(4, NetworkClass::Sorting, Encoding::Dfwd, 2)) == SolverStatus::Unsat);
    CHECK(status_of(make(4, NetworkClass::Sorting, Encoding::Dfwd, 3)) == SolverStatus::Sat);
}

TEST_CASE("halver_invalid_set") {
    {
        const VectorSet bad = halver_invalid_set(2, Rational(0, 1));
        CHECK(bad.count() == 1);
        CHECK(bad.contains(1));
    }
    {
        // Enumerated directly from the definition.
        const VectorSet bad = halver_invalid_set(4, Rational(0, 1));
        const std::set<std::uint32_t> expected{1, 2, 3, 5, 6, 7, 9, 10, 11};
        CHECK(bad.count() == expected.size());
        for (std::uint32_t m = 0; m < 16; ++m)
            CHECK(bad.contains(m) == (expected.count(m) > 0));
    }
    for (const auto eps : {Rational(0, 1), Rational(1, 4), Rational(1, 2)}) {
        for (const int n : {2, 4, 6, 8}) {
            const VectorSet bad = halver_invalid_set(n, eps);
            for (std::uint32_t m = 0; m < bad.universe_size(); ++m)
                if (m == sorted_value(m, n))
                    CHECK(!bad.contains(m));
        }
    }
    CHECK_THROWS_AS(halver_invalid_set(5, Rational(0, 1)), argument_error);
}

TEST_CASE("build_dfwd: perfect halver on 4 channels vs brute force") {
    // Brute-force ground truth over all layered networks of depth <= 2.
    const auto exists_at_depth = [](int depth) {
        bool found = false;
        std::vector<std::vector<Comparator>> layer_choices;
        // all valid single layers on 4 channels
        std::vector<Layer> layers;
        const std::vector<Comparator> comps = oracle::all_comparators(4);
        for (std::uint32_t mask = 0; mask < (1u << comps.size()); ++mask) {
            Layer layer;
            std::uint32_t used = 0;
            bool ok = true;
            for (std::size_t x = 0; x < comps.size() && ok; ++x) {
                if (!(mask & (1u << x)))
                    continue;
                const std::uint32_t touch =
                    (1u << (comps[x].i - 1)) | (1u << (comps[x].j - 1));
                if (used & touch)
                    ok = false;
                used |= touch;
                layer.push_back(comps[x]);
            }
            if (ok)
                layers.push_back(layer);
        }
        const std::function<void(std::vector<Layer>&, int)> recurse = [&](std::vector<Layer>& acc,
                                                                          int remaining) {
            if (found)
                return;
            if (remaining == 0) {
                const LayeredNetwork net(4, acc);
                if (certify(net, NetworkClass::Halver, Rational(0, 1)).verdict)
                    found = true;
                return;
            }
            for (const Layer& layer : layers) {
                acc.push_back(layer);
                recurse(acc, remaining - 1);
                acc.pop_back();
            }
        };
        std::vector<Layer> acc;
        recurse(acc, depth);
        return found;
    };

    ProblemSpec spec = make(4, NetworkClass::Halver, Encoding::Dfwd, 1);
    spec.eps = Rational(0, 1);
    CHECK(exists_at_depth(1) == false);
    CHECK(status_of(spec) == SolverStatus::Unsat);
    spec.bound = 2;
    CHECK(exists_at_depth(2) == true);
    Encoded enc = build(spec);
    SolverConfig cfg;
    const SolverVerdict verdict = solve(enc.formula, cfg);
    REQUIRE(verdict.status == SolverStatus::Sat);
    const LayeredNetwork witness = decode_network(verdict, enc.pool, spec);
    CHECK(certify(witness, NetworkClass::Halver, Rational(0, 1)).verdict);
}

TEST_CASE("cross_half_restriction") {
    {
        VarPool pool;
        CnfFormula f;
        valid_depth_constraints(4, 1, pool, f);
        const std::size_t before = f.clause_count();
        cross_half_restriction(4, 1, pool, f);
        CHECK(f.clause_count() - before == 2); // (1,2) and (3,4) forbidden
    }
    {
        // 18 channels: 81 cross pairs remain per layer.
        VarPool pool;
        CnfFormula f;
        valid_depth_constraints(18, 4, pool, f);
        const std::size_t before = f.clause_count();
        cross_half_restriction(18, 4, pool, f);
        const std::size_t forbidden_per_layer = (18 * 17 / 2) - 81;
        CHECK(f.clause_count() - before == 4 * forbidden_per_layer);
    }
    // The 18-channel quarter-halver from the figures satisfies it.
    const LayeredNetwork net = read_network_file(kNetworksDir / "halver_quarter_n18.json");
    for (const Layer& layer : net.layers())
        for (const Comparator c : layer)
            CHECK((c.i <= 9 && c.j > 9));
}

TEST_CASE("build_dbck and build_single_depth") {
    CHECK(status_of(make(3, NetworkClass::Sorting, Encoding::Dbck, 2)) == SolverStatus::Unsat);
    CHECK(status_of(make(3, NetworkClass::Sorting, Encoding::Dbck, 3)) == SolverStatus::Sat);

    {
        // Depth-2 single-exception network on 3 channels, witness has 2
        // comparators.
        ProblemSpec spec = make(3, NetworkClass::SingleException, Encoding::Dbck, 2);
        Encoded enc = build(spec);
        SolverConfig cfg;
        const SolverVerdict verdict = solve(enc.formula, cfg);
        REQUIRE(verdict.status == SolverStatus::Sat);
        const LayeredNetwork witness = decode_network(verdict, enc.pool, spec);
        CHECK(certify(witness, NetworkClass::SingleException).verdict);
        CHECK(witness.size() == 2);
    }
    CHECK(status_of(make(3, NetworkClass::SingleException, Encoding::Dbck, 1)) ==
          SolverStatus::Unsat);

    {
        // Depth 0 on 2 channels: the empty network, exception input 1.
        ProblemSpec spec = make(2, NetworkClass::SingleException, Encoding::Dbck, 0);
        Encoded enc = build(spec);
        SolverConfig cfg;
        const SolverVerdict verdict = solve(enc.formula, cfg);
        REQUIRE(verdict.status == SolverStatus::Sat);
        const LayeredNetwork witness = decode_network(verdict, enc.pool, spec);
        CHECK(witness.size() == 0);
        CHECK(verdict.value(enc.pool.at(VarKey::sub_unsorted(0, 1, 1))));
    }
}

TEST_CASE("size caps") {
    // At depth 2 a 3-channel single-exception network needs 2 comparators.
    ProblemSpec spec = make(3, NetworkClass::SingleException, Encoding::Dbck, 2);
    spec.size_cap = 2;
    CHECK(status_of(spec) == SolverStatus::Sat);
    spec.size_cap = 1;
    CHECK(status_of(spec) == SolverStatus::Unsat);
    // A cap at the physical maximum changes nothing.
    ProblemSpec wide = make(3, NetworkClass::Sorting, Encoding::Dbck, 3);
    ProblemSpec capped = wide;
    capped.size_cap = 3 * (3 / 2);
    CHECK(status_of(wide) == status_of(capped));
}

TEST_CASE("state variable accounting") {
    for (int n = 2; n <= 4; ++n) {
        for (int bound = 0; bound <= 3; ++bound) {
            {
                const Encoded enc = build(make(n, NetworkClass::Sorting, Encoding::Sfwd, bound));
                CHECK(enc.stats.state_vars == (bound + 1) * (std::int64_t{1} << n));
                CHECK(enc.stats.select_vars == bound * n * (n - 1) / 2);
                CHECK(enc.stats.aux_vars == 0);
                CHECK(enc.pool.num_vars() == enc.stats.select_vars + enc.stats.state_vars);
            }
            {
                const Encoded enc = build(make(n, NetworkClass::Sorting, Encoding::Dbck, bound));
                CHECK(enc.stats.state_vars ==
                      (std::int64_t{bound} * (n - 1) + 1) * (std::int64_t{1} << n));
            }
            {
                const Encoded enc =
                    build(make(n, NetworkClass::SingleException, Encoding::Sbck, bound));
                // ladder helpers for the one-hot over 2^n inputs
                CHECK(enc.stats.aux_vars == (std::int64_t{1} << n) - 1);
            }
        }
    }
}

TEST_CASE("encoding equivalence on a small grid") {
    for (int n = 2; n <= 4; ++n) {
        for (int s = 0; s <= 6; ++s) {
            const SolverStatus fwd = status_of(make(n, NetworkClass::Sorting, Encoding::Sfwd, s));
            const SolverStatus bck = status_of(make(n, NetworkClass::Sorting, Encoding::Sbck, s));
            INFO("n=" << n << " s=" << s);
            CHECK(fwd == bck);
        }
        for (int d = 0; d <= 4; ++d) {
            const SolverStatus fwd = status_of(make(n, NetworkClass::Sorting, Encoding::Dfwd, d));
            const SolverStatus bck = status_of(make(n, NetworkClass::Sorting, Encoding::Dbck, d));
            INFO("n=" << n << " d=" << d);
            CHECK(fwd == bck);
        }
    }
}

TEST_CASE("fixed-size satisfiability embeds into fixed depth") {
    for (int n = 2; n <= 4; ++n) {
        for (int s = 0; s <= 6; ++s) {
            if (status_of(make(n, NetworkClass::Sorting, Encoding::Sfwd, s)) !=
                SolverStatus::Sat)
                continue;
            CHECK(status_of(make(n, NetworkClass::Sorting, Encoding::Dfwd, s)) ==
                  SolverStatus::Sat);
        }
    }
}

TEST_CASE("reduced implications preserve satisfiability") {
    for (int n = 2; n <= 4; ++n) {
        for (int s = 0; s <= 6; ++s) {
            ProblemSpec full = make(n, NetworkClass::Sorting, Encoding::Sfwd, s);
            ProblemSpec reduced = full;
            reduced.reduced_implications = true;
            INFO("sfwd n=" << n << " s=" << s);
            CHECK(status_of(full) == status_of(reduced));
        }
        for (int d = 0; d <= 4; ++d) {
            ProblemSpec full = make(n, NetworkClass::Sorting, Encoding::Dfwd, d);
            ProblemSpec reduced = full;
            reduced.reduced_implications = true;
            INFO("dfwd n=" << n << " d=" << d);
            CHECK(status_of(full) == status_of(reduced));
        }
    }
    for (int d = 0; d <= 3; ++d) {
        ProblemSpec full = make(4, NetworkClass::Halver, Encoding::Dfwd, d);
        full.eps = Rational(1, 4);
        ProblemSpec reduced = full;
        reduced.reduced_implications = true;
        CHECK(status_of(full) == status_of(reduced));
    }
    // And reduced-mode witnesses still certify.
    ProblemSpec spec = make(4, NetworkClass::Sorting, Encoding::Sfwd, 5);
    spec.reduced_implications = true;
    SolverConfig cfg;
    const SolveOutcome outcome = solve_problem(spec, cfg);
    REQUIRE(outcome.status == SolverStatus::Sat);
    CHECK(outcome.certification->verdict);
}

TEST_CASE("model completeness at n=3, s=3") {
    // Every 3-comparator sorting network on 3 channels, by brute force.
    std::set<std::vector<Comparator>> expected;
    oracle::for_each_sequence(3, 3, [&](const std::vector<Comparator>& seq) {
        if (oracle::sorts_all_binary_inputs(LayeredNetwork::sequential(3, seq)))
            expected.insert(seq);
    });

    // Every distinct selection-variable assignment of the formula.
    ProblemSpec spec = make(3, NetworkClass::Sorting, Encoding::Sfwd, 3);
    Encoded enc = build(spec);
    std::vector<int> selection;
    for (int k = 1; k <= 3; ++k)
        for (int i = 1; i < 3; ++i)
            for (int j = i + 1; j <= 3; ++j)
                selection.push_back(enc.pool.at(VarKey::select(k, i, j)));
    const auto models = enumerate_projected_models(enc.formula, selection, 1000);

    std::set<std::vector<Comparator>> decoded;
    for (const auto& assignment : models) {
        std::vector<Comparator> seq(3);
        std::size_t slot = 0;
        for (int k = 1; k <= 3; ++k)
            for (int i = 1; i < 3; ++i)
                for (int j = i + 1; j <= 3; ++j) {
                    if (assignment[slot])
                        seq[static_cast<std::size_t>(k - 1)] = {i, j};
                    ++slot;
                }
        decoded.insert(seq);
    }
    CHECK(decoded == expected);
    CHECK(!decoded.empty());
}

TEST_CASE("byte-identical rebuilds") {
    for (const Encoding enc : {Encoding::Sfwd, Encoding::Sbck, Encoding::Dfwd, Encoding::Dbck}) {
        ProblemSpec spec = make(4, NetworkClass::Sorting, enc, 3);
        const std::string once = write_dimacs(build(spec).formula);
        const std::string twice = write_dimacs(build(spec).formula);
        CHECK(once == twice);
        CHECK(once.size() > 100);
    }
}

TEST_CASE("simplify_formula keeps satisfiability and models") {
    for (int n = 2; n <= 3; ++n) {
        for (int s = 0; s <= 4; ++s) {
            const Encoded enc = build(make(n, NetworkClass::Sorting, Encoding::Sfwd, s));
            const CnfFormula simplified = simplify_formula(enc.formula);
            CHECK(simplified.clause_count() <= enc.formula.clause_count());
            CHECK(CdclSolver(enc.formula).solve() == CdclSolver(simplified).solve());
        }
    }
    CnfFormula conflicted;
    conflicted.add_clause({1});
    conflicted.add_clause({-1});
    CHECK(CdclSolver(simplify_formula(conflicted)).solve() == SolverStatus::Unsat);
}
