// Command-line front end: encode instances to DIMACS, solve and certify,
// verify and render network files, and run the optimality searches.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sortnet/encodings.hpp"
#include "sortnet/network.hpp"
#include "sortnet/network_json.hpp"
#include "sortnet/search.hpp"
#include "sortnet/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitUnsat = 20;

struct SpecFlags {
    int n = 0;
    std::string cls = "sorting";
    std::optional<int> size;
    std::optional<int> depth;
    std::string encoding;
    std::string eps = "0";
    std::optional<int> size_cap;
    bool cross_half = false;
    bool reduced = false;
};

struct SolverFlags {
    std::string command;
    bool force_embedded = false;
    double time_limit = 0;
    std::string temp_dir;
    std::size_t clause_cap = 0;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& flags) {
    cmd->add_option("--n", flags.n, "channel count")->required();
    cmd->add_option("--class", flags.cls, "sorting | single-exception | halver")
        ->default_val("sorting");
    cmd->add_option("--size", flags.size, "comparator count (fixed-size instance)");
    cmd->add_option("--depth", flags.depth, "layer count (fixed-depth instance)");
    cmd->add_option("--encoding", flags.encoding, "sfwd | sbck | dfwd | dbck");
    cmd->add_option("--eps", flags.eps, "halver tolerance as an exact rational, e.g. 1/4");
    cmd->add_option("--size-cap", flags.size_cap, "bound on total comparators (fixed depth)");
    cmd->add_flag("--cross-half", flags.cross_half, "halvers: only cross-half comparators");
    cmd->add_flag("--reduced", flags.reduced,
                  "forward encodings: emit one-directional implications");
}

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--solver", flags.command,
                    "external solver command (default: SORTNET_SOLVER env var)");
    cmd->add_flag("--embedded", flags.force_embedded, "use the embedded solver");
    cmd->add_option("--time-limit", flags.time_limit, "per-solve wall limit in seconds");
    cmd->add_option("--temp-dir", flags.temp_dir, "scratch directory for DIMACS files");
    cmd->add_option("--clause-cap", flags.clause_cap, "embedded solver clause cap");
}

sortnet::ProblemSpec make_spec(const SpecFlags& flags) {
    using namespace sortnet;
    if (flags.size && flags.depth)
        throw argument_error("--size and --depth are mutually exclusive");
    if (!flags.size && !flags.depth)
        throw argument_error("one of --size or --depth is required");
    ProblemSpec spec;
    spec.n = flags.n;
    spec.cls = network_class_from_string(flags.cls);
    const bool fixed_size = flags.size.has_value();
    spec.bound = fixed_size ? *flags.size : *flags.depth;
    if (!flags.encoding.empty()) {
        spec.encoding = encoding_from_string(flags.encoding);
    } else if (spec.cls == NetworkClass::SingleException) {
        spec.encoding = fixed_size ? Encoding::Sbck : Encoding::Dbck;
    } else {
        spec.encoding = fixed_size ? Encoding::Sfwd : Encoding::Dfwd;
    }
    if (fixed_size != spec.fixed_size())
        throw argument_error("encoding " + to_string(spec.encoding) + " expects " +
                             (spec.fixed_size() ? "--size" : "--depth"));
    spec.eps = Rational::parse(flags.eps);
    spec.size_cap = flags.size_cap;
    spec.cross_half_only = flags.cross_half;
    spec.reduced_implications = flags.reduced;
    spec.validate();
    return spec;
}

sortnet::SolverConfig make_solver_config(const SolverFlags& flags) {
    using namespace sortnet;
    SolverConfig cfg = SolverConfig::from_environment();
    if (!flags.command.empty()) {
        cfg.mode = SolverMode::External;
        cfg.command = flags.command;
    }
    if (flags.force_embedded)
        cfg.mode = SolverMode::Embedded;
    if (flags.time_limit > 0)
        cfg.time_limit_seconds = flags.time_limit;
    if (!flags.temp_dir.empty())
        cfg.temp_dir = flags.temp_dir;
    if (flags.clause_cap > 0)
        cfg.embedded_clause_cap = flags.clause_cap;
    return cfg;
}

nlohmann::json spec_to_json(const sortnet::ProblemSpec& spec) {
    nlohmann::json j{
        {"n", spec.n},
        {"class", sortnet::to_string(spec.cls)},
        {"encoding", sortnet::to_string(spec.encoding)},
        {spec.fixed_size() ? "size" : "depth", spec.bound},
    };
    if (spec.cls == sortnet::NetworkClass::Halver)
        j["eps"] = spec.eps.str();
    if (spec.size_cap)
        j["size_cap"] = *spec.size_cap;
    if (spec.cross_half_only)
        j["cross_half_only"] = true;
    if (spec.reduced_implications)
        j["reduced_implications"] = true;
    return j;
}

void print_certification(const sortnet::CertificationRecord& rec, std::ostream& out) {
    out << "certification: class=" << sortnet::to_string(rec.cls)
        << " verdict=" << (rec.verdict ? "pass" : "fail");
    if (rec.cls != sortnet::NetworkClass::Halver)
        out << " unsorted_inputs=" << rec.unsorted_count;
    if (rec.unsorted_input)
        out << " exception_input=" << *rec.unsorted_input;
    if (rec.violation)
        out << " violation_input=" << rec.violation->input << " k=" << rec.violation->k;
    out << '\n';
}

// ---------------------------------------------------------------------------

int cmd_encode(const SpecFlags& sflags, const std::string& output,
               std::string varmap_path, std::string spec_path) {
    using namespace sortnet;
    const ProblemSpec spec = make_spec(sflags);
    const Encoded enc = build(spec);

    std::ofstream cnf_out(output);
    if (!cnf_out) {
        std::cerr << "error: cannot write " << output << '\n';
        return kExitRuntime;
    }
    write_dimacs(enc.formula, cnf_out);

    if (varmap_path.empty())
        varmap_path = output + ".vars.json";
    nlohmann::json vars;
    for (const auto& [key, id] : enc.pool.registry_view())
        vars[key] = id;
    std::ofstream varmap_out(varmap_path);
    varmap_out << nlohmann::json{{"num_vars", enc.pool.num_vars()}, {"vars", vars}}.dump(1)
               << '\n';

    if (spec_path.empty())
        spec_path = output + ".spec.json";
    std::ofstream spec_out(spec_path);
    spec_out << spec_to_json(spec).dump(1) << '\n';

    std::cout << spec.describe() << ": " << enc.pool.num_vars() << " vars ("
              << enc.stats.select_vars << " select, " << enc.stats.state_vars << " state, "
              << enc.stats.aux_vars << " aux), " << enc.formula.clause_count() << " clauses -> "
              << output << '\n';
    return kExitOk;
}

int cmd_solve(const SpecFlags& sflags, const SolverFlags& vflags,
              const std::string& witness_path) {
    using namespace sortnet;
    const ProblemSpec spec = make_spec(sflags);
    const SolverConfig cfg = make_solver_config(vflags);
    const SolveOutcome outcome = solve_problem(spec, cfg);
    std::cout << spec.describe() << ": " << to_string(outcome.status) << " ("
              << outcome.seconds << " s, " << outcome.stats.clauses << " clauses)\n";
    switch (outcome.status) {
    case SolverStatus::Sat: {
        print_certification(*outcome.certification, std::cout);
        write_network_file(witness_path, *outcome.witness);
        std::cout << "witness: " << witness_path << " (size " << outcome.witness->size()
                  << ", depth " << outcome.witness->depth() << ")\n";
        return kExitOk;
    }
    case SolverStatus::Unsat:
        return kExitUnsat;
    case SolverStatus::Unknown:
        return kExitUnknown;
    }
    return kExitRuntime;
}

int cmd_verify(const std::string& network_path, const std::string& cls_name,
               const std::string& eps_text) {
    using namespace sortnet;
    const LayeredNetwork net = read_network_file(network_path);
    const NetworkClass cls = network_class_from_string(cls_name);
    const CertificationRecord rec = certify(net, cls, Rational::parse(eps_text));
    std::cout << network_path << ": n=" << net.channels() << " size=" << net.size()
              << " depth=" << net.depth() << '\n';
    print_certification(rec, std::cout);
    return rec.verdict ? kExitOk : kExitUnsat;
}

int cmd_render(const std::string& network_path) {
    const sortnet::LayeredNetwork net = sortnet::read_network_file(network_path);
    std::cout << sortnet::render_ascii(net);
    return kExitOk;
}

void print_trace(const std::vector<sortnet::TraceEntry>& trace) {
    for (const auto& entry : trace)
        std::cout << "  " << entry.instance << ": " << sortnet::to_string(entry.status) << " ("
                  << entry.seconds << " s, " << entry.clauses << " clauses, " << entry.vars
                  << " vars)\n";
}

int cmd_search(const std::string& target, const SpecFlags& sflags, const SolverFlags& vflags,
               const sortnet::SearchBudget& budget, const std::string& witness_path,
               bool verbose) {
    using namespace sortnet;
    const NetworkClass cls = network_class_from_string(sflags.cls);
    const SolverConfig cfg = make_solver_config(vflags);
    std::optional<Encoding> encoding;
    if (!sflags.encoding.empty())
        encoding = encoding_from_string(sflags.encoding);

    if (target == "pareto") {
        const ParetoResult result = pareto_size_depth(sflags.n, cls, cfg, budget);
        if (verbose)
            print_trace(result.trace);
        std::cout << "(size, depth) frontier for " << to_string(cls) << " n=" << sflags.n
                  << ":";
        for (const auto& point : result.points)
            std::cout << " (" << point.size << "," << point.depth << ")";
        std::cout << (result.complete ? "" : " [incomplete: budget exhausted]") << '\n';
        if (!witness_path.empty() && !result.points.empty())
            write_network_file(witness_path, result.points.back().witness);
        return result.complete ? kExitOk : kExitUnknown;
    }

    SearchResult result;
    if (target == "size") {
        result = optimal_size(sflags.n, cls, encoding, cfg, budget);
    } else if (target == "depth") {
        result = optimal_depth(sflags.n, cls, encoding, cfg, budget,
                               Rational::parse(sflags.eps), sflags.cross_half);
    } else {
        std::cerr << "error: unknown search target '" << target << "'\n";
        return kExitUsage;
    }
    if (verbose)
        print_trace(result.trace);
    std::cout << "optimal " << target << " for " << to_string(cls) << " n=" << sflags.n << ": "
              << result.bounds_str() << '\n';
    if (result.witness && !witness_path.empty()) {
        write_network_file(witness_path, *result.witness);
        std::cout << "witness: " << witness_path << '\n';
    }
    return result.resolved() ? kExitOk : kExitUnknown;
}

// Reproduces the optimality tables over a channel range: depth, size, and
// the joint (size, depth) frontier for sorting and single-exception
// networks. Cells a budget cannot settle are printed as intervals.
int cmd_tables(int min_n, int max_n, const std::string& format, const std::string& out_path,
               const std::string& witness_dir, const SolverFlags& vflags,
               const sortnet::SearchBudget& budget, bool skip_pareto) {
    using namespace sortnet;
    const SolverConfig cfg = make_solver_config(vflags);
    const std::vector<NetworkClass> classes{NetworkClass::SingleException,
                                            NetworkClass::Sorting};

    const auto witness_file = [&](const std::string& stem,
                                  const std::optional<LayeredNetwork>& net) {
        if (witness_dir.empty() || !net)
            return;
        std::filesystem::create_directories(witness_dir);
        write_network_file(std::filesystem::path(witness_dir) / (stem + ".json"), *net);
    };

    std::map<std::string, std::vector<std::string>> rows;
    const auto row_name = [](NetworkClass cls, const std::string& metric) {
        return metric + (cls == NetworkClass::SingleException ? "_1" : "");
    };

    for (int n = min_n; n <= max_n; ++n) {
        for (const NetworkClass cls : classes) {
            SearchResult depth = optimal_depth(n, cls, std::nullopt, cfg, budget);
            rows[row_name(cls, "D")].push_back(depth.bounds_str());
            witness_file(row_name(cls, "depth") + "_n" + std::to_string(n), depth.witness);

            SearchResult size = optimal_size(n, cls, std::nullopt, cfg, budget);
            rows[row_name(cls, "S")].push_back(size.bounds_str());
            witness_file(row_name(cls, "size") + "_n" + std::to_string(n), size.witness);

            if (!skip_pareto) {
                ParetoResult pareto = pareto_size_depth(n, cls, cfg, budget);
                std::string cell;
                for (const auto& point : pareto.points)
                    cell += "(" + std::to_string(point.size) + "," +
                            std::to_string(point.depth) + ")";
                if (!pareto.complete)
                    cell += "?";
                rows[row_name(cls, "SD")].push_back(cell);
                if (!pareto.points.empty())
                    witness_file(row_name(cls, "pareto") + "_n" + std::to_string(n),
                                 pareto.points.back().witness);
            }
        }
    }

    std::ostringstream out;
    const std::vector<std::string> order{"D_1", "D", "S_1", "S", "SD_1", "SD"};
    if (format == "csv") {
        out << "metric";
        for (int n = min_n; n <= max_n; ++n)
            out << ',' << n;
        out << '\n';
        for (const auto& name : order) {
            if (!rows.count(name))
                continue;
            out << name;
            for (const auto& cell : rows[name])
                out << ',' << cell;
            out << '\n';
        }
    } else {
        out << "| n |";
        for (int n = min_n; n <= max_n; ++n)
            out << ' ' << n << " |";
        out << "\n|---|";
        for (int n = min_n; n <= max_n; ++n)
            out << "---|";
        out << '\n';
        for (const auto& name : order) {
            if (!rows.count(name))
                continue;
            out << "| " << name << " |";
            for (const auto& cell : rows[name])
                out << ' ' << (cell.empty() ? "-" : cell) << " |";
            out << '\n';
        }
        out << "\nBounds in brackets are unsettled within the budget; "
               "lower bounds are solver-attested unsatisfiability results.\n";
    }

    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream file(out_path);
        if (!file) {
            std::cerr << "error: cannot write " << out_path << '\n';
            return kExitRuntime;
        }
        file << out.str();
        std::cout << "tables written to " << out_path << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal comparator networks via propositional encodings"};
    app.require_subcommand(1);

    SpecFlags sflags;
    SolverFlags vflags;
    sortnet::SearchBudget budget;
    std::string output = "instance.cnf";
    std::string varmap_path;
    std::string spec_path;
    std::string witness_path = "witness.json";
    std::string network_path;
    std::string cls_name = "sorting";
    std::string eps_text = "0";
    std::string target = "size";
    std::string format = "markdown";
    std::string out_path;
    std::string witness_dir;
    int min_n = 2;
    int max_n = 6;
    bool skip_pareto = false;
    bool verbose = false;

    CLI::App* encode = app.add_subcommand("encode", "write an instance as DIMACS CNF");
    add_spec_flags(encode, sflags);
    encode->add_option("-o,--output", output, "DIMACS output path")->required();
    encode->add_option("--varmap", varmap_path, "variable-map sidecar path");
    encode->add_option("--spec-out", spec_path, "instance description sidecar path");

    CLI::App* solve = app.add_subcommand("solve", "solve an instance and certify the witness");
    add_spec_flags(solve, sflags);
    add_solver_flags(solve, vflags);
    solve->add_option("--witness", witness_path, "witness network output path");

    CLI::App* verify = app.add_subcommand("verify", "certify a network file against a class");
    verify->add_option("--network", network_path, "network JSON file")->required();
    verify->add_option("--class", cls_name, "sorting | single-exception | halver")
        ->default_val("sorting");
    verify->add_option("--eps", eps_text, "halver tolerance, e.g. 1/4");

    CLI::App* render = app.add_subcommand("render", "draw a network file as text");
    render->add_option("--network", network_path, "network JSON file")->required();

    CLI::App* search = app.add_subcommand("search", "minimize size, depth, or both");
    search->add_option("--target", target, "size | depth | pareto")->required();
    search->add_option("--n", sflags.n, "channel count")->required();
    search->add_option("--class", sflags.cls, "sorting | single-exception | halver")
        ->default_val("sorting");
    search->add_option("--encoding", sflags.encoding, "sfwd | sbck | dfwd | dbck");
    search->add_option("--eps", sflags.eps, "halver tolerance, e.g. 1/4");
    search->add_flag("--cross-half", sflags.cross_half,
                     "halvers: only cross-half comparators");
    add_solver_flags(search, vflags);
    search->add_option("--per-instance-limit", budget.per_instance_seconds,
                       "wall limit per solver call (s)");
    search->add_option("--total-limit", budget.total_seconds, "overall wall limit (s)");
    std::optional<int> max_bound_flag;
    search->add_option("--max-bound", max_bound_flag, "largest bound to try");
    search->add_option("--witness", witness_path, "witness network output path");
    search->add_flag("-v,--verbose", verbose, "print the per-instance trace");

    CLI::App* tables = app.add_subcommand("tables", "reproduce the optimality tables");
    tables->add_option("--min-n", min_n, "first channel count");
    tables->add_option("--max-n", max_n, "last channel count");
    tables->add_option("--format", format, "markdown | csv");
    tables->add_option("--out", out_path, "write tables to a file instead of stdout");
    tables->add_option("--witness-dir", witness_dir, "directory for witness networks");
    tables->add_flag("--skip-pareto", skip_pareto, "skip the joint (size,depth) rows");
    add_solver_flags(tables, vflags);
    tables->add_option("--per-instance-limit", budget.per_instance_seconds,
                       "wall limit per solver call (s)");
    tables->add_option("--total-limit", budget.total_seconds, "overall wall limit (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (encode->parsed()) {
            // spec flags only; fixed-size/depth comes from --size/--depth
            return cmd_encode(sflags, output, varmap_path, spec_path);
        }
        if (solve->parsed())
            return cmd_solve(sflags, vflags, witness_path);
        if (verify->parsed())
            return cmd_verify(network_path, cls_name, eps_text);
        if (render->parsed())
            return cmd_render(network_path);
        if (search->parsed()) {
            budget.max_bound = max_bound_flag;
            return cmd_search(target, sflags, vflags, budget, witness_path, verbose);
        }
        if (tables->parsed())
            return cmd_tables(min_n, max_n, format, out_path, witness_dir, vflags, budget,
                              skip_pareto);
    } catch (const sortnet::argument_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const sortnet::solver_error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const sortnet::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const sortnet::integrity_error& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
