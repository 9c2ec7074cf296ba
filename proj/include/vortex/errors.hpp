#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotVerified : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedSize : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotIsolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundaryHit : std::runtime_error {
    double suggested_halfwidth;
    BoundaryHit(const std::string& what, double suggestion)
        : std::runtime_error(what), suggested_halfwidth(suggestion) {}
};

struct SliceConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFound : std::out_of_range {
    using std::out_of_range::out_of_range;
};

} // namespace vortex
