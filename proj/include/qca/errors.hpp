#pragma once

#include <stdexcept>
#include <string>

namespace qca {

// Mixing objects with different truncation settings (h-order, depth, degree cap).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

// A requested coefficient depends on terms that were discarded by a window
// or cap; the result would be unsound, so we refuse instead of guessing.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string &msg) : std::runtime_error(msg) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string &msg) : std::runtime_error(msg) {}
};

// Normal-form rewriting exceeded its budget or produced an inconsistent word.
struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace qca
