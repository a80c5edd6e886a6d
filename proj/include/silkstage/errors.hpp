#pragma once

#include <stdexcept>
#include <string>

namespace silkstage {

struct InvalidParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Physics produced a NaN/Inf; carries the first offending node.
struct NumericDivergenceError : std::runtime_error {
    int node_index;
    double time;
    NumericDivergenceError(int node, double t, const std::string& what)
        : std::runtime_error(what), node_index(node), time(t) {}
};

struct InvalidPrimitiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfOrderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A record broke but neither arm shows a lift onset to credit.
struct AttributionImpossibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidPolicyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingFailedError : std::runtime_error {
    int generation;
    TrainingFailedError(int gen, const std::string& what)
        : std::runtime_error(what), generation(gen) {}
};

// Trace file does not match the config it is replayed against.
struct IncompatibleTraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trace file is unreadable or structurally broken; carries the 1-based line.
struct TraceParseError : std::runtime_error {
    long line;
    TraceParseError(long line_no, const std::string& what)
        : std::runtime_error(what), line(line_no) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace silkstage
