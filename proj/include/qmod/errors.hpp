#pragma once

#include <stdexcept>
#include <string>

namespace qmod {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the function.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// A series did not converge within its term cap.
class EvaluationError : public Error
{
public:
    EvaluationError(const std::string & what, double partial_sum)
        : Error(what), _partial_sum(partial_sum) {}

    double partial_sum() const { return _partial_sum; }

private:
    double _partial_sum;
};

class RootFindError : public Error
{
public:
    using Error::Error;
};

/// Invalid polygon or quadrilateral (orientation, self-intersection, corners).
class GeometryError : public Error
{
public:
    using Error::Error;
};

class MeshError : public Error
{
public:
    using Error::Error;
};

class AssemblyError : public Error
{
public:
    using Error::Error;
};

/// The iterative solver hit its iteration cap or broke down.
class SolverError : public Error
{
public:
    using Error::Error;
};

} // namespace qmod
