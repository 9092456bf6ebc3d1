#pragma once

#include <stdexcept>
#include <string>

namespace lorafp {

// Bad or inconsistent user-supplied configuration (column mapping, fractions, k > N, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A cell or file that could not be parsed. Carries human-readable location info in the message.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally wrong input (wrong arity, missing header, malformed manifest).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input that violates a domain invariant (rssi >= 0, overlapping split lists, ...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model fitting cannot proceed (empty training set, all-sentinel fingerprints, diverging loss).
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lorafp
