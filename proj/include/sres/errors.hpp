#pragma once

#include <stdexcept>
#include <string>

namespace sres {

/// Malformed or inconsistent configuration (unknown key, missing key, bad value).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read, written, or decoded.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver iterate became non-finite.
class SolverDiverged : public std::runtime_error {
public:
    SolverDiverged(int iteration, const std::string& what)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// An analysis routine could not produce a result (no edge found, tile too large, ...).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sres
