#pragma once

#include <stdexcept>
#include <string>

namespace chirp2d {

/// Base class for runtime failures raised by the library. Precondition
/// violations (bad sizes, out-of-domain pairs) throw std::invalid_argument.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The 2x2 normal matrix of a chirp basis (or of the 2-D regressor) is
/// numerically singular.
class DegenerateBasis : public Error {
public:
    using Error::Error;
};

/// Every node of a coarse grid produced a non-finite objective value.
class AllInvalid : public Error {
public:
    using Error::Error;
};

/// Asymptotic covariance requested for a component with A^2 + B^2 = 0.
class ZeroPower : public Error {
public:
    using Error::Error;
};

/// Malformed input file or document (PGM, grid file, JSON, CSV).
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace chirp2d
