#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cdcl.hpp"
#include "cnf.hpp"
#include "encodings.hpp"
#include "errors.hpp"
#include "network.hpp"

namespace sortnet {

enum class SolverMode { External, Embedded };

// How to run a formula. External mode shells out to any solver that accepts
// a DIMACS path and prints SAT-competition style output; embedded mode uses
// the built-in CDCL solver, capped by formula size so oversized requests
// fail loudly instead of thrashing.
struct SolverConfig {
    SolverMode mode = SolverMode::Embedded;
    std::string command;               // external solver, e.g. "kissat -q"
    double time_limit_seconds = 0;     // 0 = unlimited
    std::filesystem::path temp_dir;    // external mode scratch space
    std::size_t embedded_clause_cap = 50000;

    // Embedded unless the SORTNET_SOLVER environment variable names an
    // external command.
    static SolverConfig from_environment() {
        SolverConfig cfg;
        if (const char* cmd = std::getenv("SORTNET_SOLVER"); cmd && *cmd) {
            cfg.mode = SolverMode::External;
            cfg.command = cmd;
        }
        return cfg;
    }

    std::filesystem::path scratch_dir() const {
        if (!temp_dir.empty())
            return temp_dir;
        return std::filesystem::temp_directory_path() / "sortnet";
    }
};

namespace detail {

inline std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int x = 15; x >= 0; --x) {
        out[static_cast<std::size_t>(x)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

inline CommandResult run_command(const std::string& cmdline) {
    CommandResult result;
    FILE* pipe = ::popen(cmdline.c_str(), "r");
    if (!pipe)
        throw solver_error("failed to launch solver command: " + cmdline);
    std::array<char, 1 << 14> buf;
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), got);
    const int status = ::pclose(pipe);
    if (status >= 0 && WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    return result;
}

inline SolverVerdict solve_external(const CnfFormula& f, const SolverConfig& cfg) {
    if (cfg.command.empty())
        throw solver_error("external mode requires a solver command");
    const std::filesystem::path dir = cfg.scratch_dir();
    std::filesystem::create_directories(dir);

    // Content-addressed scratch file: rerunning the same formula reuses the
    // same path, which keeps reruns idempotent and easy to inspect.
    const std::filesystem::path cnf_path = dir / ("cnf-" + hex64(formula_hash(f)) + ".cnf");
    {
        std::ofstream out(cnf_path);
        if (!out)
            throw solver_error("cannot write " + cnf_path.string());
        write_dimacs(f, out);
    }

    std::string cmdline;
    if (cfg.time_limit_seconds > 0)
        cmdline = "timeout " + std::to_string(static_cast<long long>(cfg.time_limit_seconds) + 1) +
                  " ";
    cmdline += cfg.command + " " + cnf_path.string() + " 2>/dev/null";
    const CommandResult run = run_command(cmdline);
    if (run.exit_code == 127 || run.exit_code == 126)
        throw solver_error("solver command not runnable: " + cfg.command);

    const SolverVerdict verdict = parse_solver_output(run.output, f.num_vars());
    if (verdict.status == SolverStatus::Unknown && run.output.empty() &&
        run.exit_code != 124) // 124 = timeout(1)
        throw solver_error("solver produced no output (exit code " +
                           std::to_string(run.exit_code) + ")");
    return verdict;
}

inline SolverVerdict solve_embedded(const CnfFormula& f, const SolverConfig& cfg) {
    if (cfg.embedded_clause_cap > 0 && f.clause_count() > cfg.embedded_clause_cap)
        throw solver_error("formula has " + std::to_string(f.clause_count()) +
                           " clauses, above the embedded solver cap of " +
                           std::to_string(cfg.embedded_clause_cap) +
                           "; raise the cap or configure an external solver");
    CdclSolver solver(f);
    SolverVerdict verdict;
    verdict.status = solver.solve(cfg.time_limit_seconds);
    if (verdict.status == SolverStatus::Sat)
        verdict.model = solver.model();
    return verdict;
}

} // namespace detail

// Runs the formula through the configured backend. Timeouts surface as
// Unknown, never as a wrong verdict.
inline SolverVerdict solve(const CnfFormula& f, const SolverConfig& cfg) {
    return cfg.mode == SolverMode::External ? detail::solve_external(f, cfg)
                                            : detail::solve_embedded(f, cfg);
}

// Reads the comparator network out of a model. Fixed-size instances must
// select exactly one comparator per position; anything else means the
// encoding itself is broken.
inline LayeredNetwork decode_network(const SolverVerdict& verdict, const VarPool& pool,
                                     const ProblemSpec& spec) {
    if (verdict.status != SolverStatus::Sat || verdict.model.empty())
        throw argument_error("decode_network needs a satisfiable verdict with a model");
    std::vector<Layer> layers;
    layers.reserve(static_cast<std::size_t>(spec.bound));
    for (int k = 1; k <= spec.bound; ++k) {
        Layer layer;
        for (int i = 1; i < spec.n; ++i)
            for (int j = i + 1; j <= spec.n; ++j)
                if (verdict.value(pool.at(VarKey::select(k, i, j))))
                    layer.push_back({i, j});
        if (spec.fixed_size() && layer.size() != 1)
            throw integrity_error("position " + std::to_string(k) + " selects " +
                                  std::to_string(layer.size()) + " comparators");
        layers.push_back(std::move(layer));
    }
    return LayeredNetwork(spec.n, std::move(layers));
}

// Build + solve + decode + certify in one step. A satisfiable result whose
// witness fails the brute-force oracle is reported as an integrity error;
// searches and the command-line tools only ever see certified witnesses.
struct SolveOutcome {
    ProblemSpec spec;
    SolverStatus status = SolverStatus::Unknown;
    std::optional<LayeredNetwork> witness;
    std::optional<CertificationRecord> certification;
    EncodingStats stats;
    double seconds = 0;
};

inline SolveOutcome solve_problem(const ProblemSpec& spec, const SolverConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    Encoded enc = build(spec);
    SolveOutcome outcome;
    outcome.spec = spec;
    outcome.stats = enc.stats;
    const SolverVerdict verdict = solve(enc.formula, cfg);
    outcome.status = verdict.status;
    if (verdict.status == SolverStatus::Sat) {
        outcome.witness = decode_network(verdict, enc.pool, spec);
        outcome.certification = certify(*outcome.witness, spec.cls, spec.eps);
        if (!outcome.certification->verdict)
            throw integrity_error("decoded witness failed certification for " +
                                  spec.describe());
    }
    outcome.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

// Enumerates distinct assignments to `projection` over all models, up to
// `limit`. Embedded only; used for exhaustive-completeness checks.
inline std::vector<std::vector<std::uint8_t>>
enumerate_projected_models(const CnfFormula& f, const std::vector<int>& projection,
                           std::size_t limit) {
    CnfFormula work = f;
    std::vector<std::vector<std::uint8_t>> found;
    std::vector<Lit> blocker;
    while (found.size() < limit) {
        CdclSolver solver(work);
        if (solver.solve() != SolverStatus::Sat)
            break;
        const auto& model = solver.model();
        std::vector<std::uint8_t> assignment;
        blocker.clear();
        for (const int v : projection) {
            const bool value = model[static_cast<std::size_t>(v)] != 0;
            assignment.push_back(value ? 1 : 0);
            blocker.push_back(value ? -v : v);
        }
        found.push_back(std::move(assignment));
        work.add_clause(blocker);
    }
    return found;
}

} // namespace sortnet
