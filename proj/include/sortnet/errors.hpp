#pragma once

#include <stdexcept>
#include <string>

namespace sortnet {

// Caller passed a value outside an operation's contract.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A solver invocation failed (missing binary, oversized formula, ...).
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input that should be machine-generated is malformed (solver output,
// DIMACS files, network JSON).
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An internal consistency check failed. Signals a bug in an encoding or a
// solver, never a user mistake.
struct integrity_error : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace sortnet
