#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace resistnet {

inline constexpr const char* kVersion = "0.1.0";

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Branch endpoints out of range, self loops, or otherwise broken topology.
class MalformedGraphError : public Error {
public:
    using Error::Error;
};

/// Input/output node sets do not form a partition of the node set.
class InvalidPartitionError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix dimensions do not match the graph.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// The output-output Laplacian block is singular (disconnected graph or
/// conductances outside the feasible set).
class SingularLaplacianError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// A numerically verified property failed; the message carries the witness.
class PropertyViolationError : public Error {
public:
    using Error::Error;
};

/// Problems in experiment spec files or CLI arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Serialize a double with 17 significant digits, enough to round-trip
/// IEEE 754 binary64 exactly. Used for all CSV artifacts.
inline std::string format_float(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace resistnet
