#pragma once

#include <stdexcept>
#include <string>

namespace metasolve {

// Base class for all library errors. Every failure mode documented on an
// operation throws a subclass of this; callers that want one catch-all can
// catch Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape disagreement between operands (matrix/vector dimensions).
struct DimensionError : Error {
  using Error::Error;
};

// QR input has numerically dependent columns.
struct RankDeficientError : Error {
  using Error::Error;
};

// Dense factorization hit a pivot below tolerance.
struct SingularMatrixError : Error {
  using Error::Error;
};

// Diffusion coefficient not strictly positive at a required sample point.
struct InvalidCoefficientError : Error {
  using Error::Error;
};

// Grid size incompatible with the requested operation (e.g. not coarsenable).
struct GridSizeError : Error {
  using Error::Error;
};

// Smoother cannot be applied (zero diagonal entry, bad relaxation factor).
struct SmootherError : Error {
  using Error::Error;
};

// Iterative estimate (power iteration) failed to settle within its budget.
struct EstimateError : Error {
  using Error::Error;
};

// Krylov recurrence produced a vanishing scalar; message names the scalar.
struct BreakdownError : Error {
  using Error::Error;
};

// Residual grew past the divergence guard; message names the configuration.
struct DivergenceError : Error {
  using Error::Error;
};

// Basis file missing, malformed, or inconsistent with the problem size.
struct BasisLoadError : Error {
  using Error::Error;
};

// Projected coarse operator is singular.
struct CoarseSingularError : Error {
  using Error::Error;
};

// Performance measurement cannot be formed (e.g. zero reference norm).
struct MeasurementError : Error {
  using Error::Error;
};

// Preference weights outside [0,1] or not summing to one.
struct InvalidWeightsError : Error {
  using Error::Error;
};

// Requested point is not a member of the strong Pareto set.
struct NotOnFrontError : Error {
  using Error::Error;
};

// Configuration file or CLI argument invalid.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace metasolve
