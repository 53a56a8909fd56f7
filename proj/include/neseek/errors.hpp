#pragma once

#include <stdexcept>
#include <string>

namespace neseek {

/// Violated precondition on an operation's arguments (dimension mismatch,
/// point outside its set, wrong regime for a flow, ...).
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Invalid object construction (negative weights, empty or unbounded
/// polyhedron, disconnected graph, non-positive adaptation rates, ...).
struct ConstructionError : std::invalid_argument {
    explicit ConstructionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed scenario configuration. `where` holds the JSON path of the
/// offending field so the CLI can point at it.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& where_, const std::string& msg)
        : std::runtime_error(where_.empty() ? msg : where_ + ": " + msg), where(where_) {}
    std::string where;
};

} // namespace neseek
