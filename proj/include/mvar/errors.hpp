#pragma once

#include <stdexcept>
#include <string>

namespace mvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter set (weights, orders, shapes).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A covariance matrix failed the symmetry or Cholesky test.
class NotSpdError : public Error {
public:
    using Error::Error;
};

/// The eigenvalue routine did not converge. Distinct from "unstable".
class EigenSolverError : public Error {
public:
    using Error::Error;
};

/// Every component density underflowed at one observation.
class UnderflowError : public Error {
public:
    UnderflowError(const std::string& what, long t) : Error(what), time_(t) {}
    long time() const noexcept { return time_; }

private:
    long time_;
};

/// Weighted normal equations of one component are singular.
class SingularComponentError : public Error {
public:
    SingularComponentError(const std::string& what, int component)
        : Error(what), component_(component) {}
    int component() const noexcept { return component_; }

private:
    int component_;
};

/// A component covariance collapsed (eigenvalue below the guard).
class ComponentCollapseError : public Error {
public:
    ComponentCollapseError(const std::string& what, int component)
        : Error(what), component_(component) {}
    int component() const noexcept { return component_; }

private:
    int component_;
};

class DegenerateFrontierError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or model file.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace mvar
