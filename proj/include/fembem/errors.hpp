#pragma once

#include <stdexcept>
#include <string>

namespace fembem {

// Bad geometry/mesh input: non-finite curve values, broken conformity,
// inverted elements, nesting violations found while building a problem.
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

// Rejected run configuration (unknown keys, invalid parameters, failed
// validation).  The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure while solving (singular factorization, stalled GMRES).
// The CLI maps this to exit code 3.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fembem
