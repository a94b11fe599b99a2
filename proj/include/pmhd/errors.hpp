#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pmhd {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Zero or near-zero pivot in a direct linear solve.
struct SingularSystemError : Error {
    explicit SingularSystemError(const std::string& msg) : Error(msg) {}
};

/// A tail integral was requested but the samples have not decayed.
struct TailTruncationError : Error {
    double last_value;
    TailTruncationError(const std::string& msg, double last)
        : Error(msg), last_value(last) {}
};

struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& msg) : Error(msg) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

/// Fixed-point iteration failed to contract within max_iter.
struct DivergenceError : Error {
    std::vector<double> history;
    DivergenceError(const std::string& msg, std::vector<double> hist = {})
        : Error(msg), history(std::move(hist)) {}
};

/// A positivity floor (1+u_p0 or the magnetic margin) was violated.
struct PositivityError : Error {
    double value;
    double where_x, where_y;
    PositivityError(const std::string& msg, double v, double x, double y)
        : Error(msg), value(v), where_x(x), where_y(y) {}
};

/// Requested evaluation outside the covered grid range.
struct CoverageError : Error {
    explicit CoverageError(const std::string& msg) : Error(msg) {}
};

struct DependencyError : Error {
    explicit DependencyError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    int line;
    explicit ConfigError(const std::string& msg, int line_no = -1)
        : Error(msg), line(line_no) {}
};

struct NotFoundError : Error {
    explicit NotFoundError(const std::string& msg) : Error(msg) {}
};

struct NonConvergenceError : Error {
    std::vector<double> history;
    NonConvergenceError(const std::string& msg, std::vector<double> hist = {})
        : Error(msg), history(std::move(hist)) {}
};

}  // namespace pmhd
