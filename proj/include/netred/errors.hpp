#pragma once

#include <stdexcept>
#include <string>

namespace netred {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Assumption 1 failures: non-tree topology or missing rooted spanning tree.
struct AssumptionViolation : Error {
  using Error::Error;
};

// Matrix-shape or definiteness violations detected at construction.
struct ValidationError : Error {
  using Error::Error;
};
struct NotSkew : ValidationError {
  using ValidationError::ValidationError;
};
struct NotPSD : ValidationError {
  using ValidationError::ValidationError;
};
struct NotPD : ValidationError {
  using ValidationError::ValidationError;
};
struct NotMinimal : ValidationError {
  using ValidationError::ValidationError;
};
struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// Numerical failures.
struct NumericalError : Error {
  using Error::Error;
};
struct NotHurwitz : NumericalError {
  using NumericalError::NumericalError;
};
struct IllConditioned : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularEdgeLaplacian : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularBlock : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularAtFrequency : NumericalError {
  using NumericalError::NumericalError;
};
struct NonFinite : NumericalError {
  using NumericalError::NumericalError;
};

// Solver outcomes.
struct Infeasible : Error {
  using Error::Error;
};
struct InheritanceViolation : Error {
  using Error::Error;
};

// Usage-level failures.
struct EdgeNotFound : Error {
  using Error::Error;
};
struct DegenerateNetwork : Error {
  using Error::Error;
};
struct GridMismatch : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct UnknownExample : Error {
  using Error::Error;
};

}  // namespace netred
