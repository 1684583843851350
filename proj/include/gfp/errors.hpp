#ifndef GFP_ERRORS_HPP
#define GFP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gfp {

// Bad configuration or parameters (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid use of an operation (bad query geometry, empty input, ...).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model-level inconsistency (non positive definite kernel, ...).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

// A hierarchy construction failed one of its postconditions. This signals a
// bug in the construction, not a data condition.
struct DecompositionError : std::runtime_error {
    explicit DecompositionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gfp

#endif
