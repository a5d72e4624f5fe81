#pragma once

#include <stdexcept>
#include <string>

namespace gtf {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by the expression / manifold / distribution file parsers.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

// A trajectory (flow, geodesic) left the chart domain.
class DomainExitError : public Error {
public:
    DomainExitError(const std::string& msg, double exit_time)
        : Error(msg + " (exit time " + std::to_string(exit_time) + ")"),
          exit_time(exit_time) {}
    double exit_time;
};

// An iteration failed to converge (Newton in log_map, patch search).
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

// Non-finite values, singular matrices, ill-conditioned systems.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Argument pair outside a convex patch, support escaping a chart, rank
// mismatches between tensors and distributions.
class ContractViolation : public Error {
public:
    using Error::Error;
};

} // namespace gtf
