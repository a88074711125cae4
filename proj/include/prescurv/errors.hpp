#pragma once

#include <stdexcept>
#include <string>

namespace prescurv {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument left the admissible range of a scalar transform
// (rho, u, v, or t out of bounds).  The message names the bound.
class DomainBoundError : public Error {
public:
    explicit DomainBoundError(const std::string& msg) : Error(msg) {}
};

// A point left the positive cone: some principal curvature (or a
// quantity that must stay positive for ellipticity) went nonpositive.
// Kept distinct from DomainBoundError so the solver can catch it and
// shrink its step instead of aborting.
class ConeViolationError : public Error {
public:
    explicit ConeViolationError(const std::string& msg) : Error(msg) {}
};

// Operation requested for a model it is not defined on (e.g. xi for K=1).
class UnsupportedModelError : public Error {
public:
    explicit UnsupportedModelError(const std::string& msg) : Error(msg) {}
};

// Caller handed in data that violates a documented precondition of a
// check (e.g. a sign check evaluated off its contract).
class StaleInputError : public Error {
public:
    explicit StaleInputError(const std::string& msg) : Error(msg) {}
};

// Spherical cap too large for the hemisphere model or for a chart.
class HemisphereError : public Error {
public:
    explicit HemisphereError(const std::string& msg) : Error(msg) {}
};

// A finite-difference stencil was requested where none exists
// (boundary ring) or could not be built.
class StencilError : public Error {
public:
    explicit StencilError(const std::string& msg) : Error(msg) {}
};

// Malformed configuration, expression, or problem file.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace prescurv
