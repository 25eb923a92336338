#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adadif {

/// Malformed or inconsistent input: parse failures, bad label files,
/// impossible sample requests, mismatched dataset statistics.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse-level failure in an edge list or label file.
class format_error : public data_error {
public:
    using data_error::data_error;
};

/// Graph is structurally outside a routine's domain
/// (disconnected, bipartite, degenerate).
class structure_error : public data_error {
public:
    using data_error::data_error;
};

/// Numerical failure that is not budget exhaustion
/// (singular system, invalid operator spectrum).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative routine exhausted its budget. Carries the last iterate
/// and the residual it reached so callers can inspect or salvage.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, std::vector<double> last, double res)
        : std::runtime_error(what), last_iterate(std::move(last)), residual(res) {}

    std::vector<double> last_iterate;
    double residual;
};

} // namespace adadif
