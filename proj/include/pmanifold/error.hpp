#pragma once

#include <stdexcept>
#include <string>

namespace pmanifold {

/// Malformed input: bad arguments, inconsistent files, violated preconditions.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// The data is well-formed but the algorithm cannot produce a result
/// (degenerate spectrum, disconnected cluster, empty grid).
class AlgorithmError : public std::runtime_error {
public:
    explicit AlgorithmError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmanifold
