#pragma once

#include <stdexcept>
#include <string>

namespace cfp {

/// Base type for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A vector or matrix argument does not match the expected dimension.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// Operation requires a strongly connected digraph.
struct NotStronglyConnected : Error {
  using Error::Error;
};

/// Operation requires a digraph with a (directed) spanning tree.
struct NotConnected : Error {
  using Error::Error;
};

/// A numerical routine failed to converge or produced an unusable result.
struct NumericalFailure : Error {
  using Error::Error;
};

/// Construction-time invariant violated (shape, sign, definiteness...).
struct InvalidParams : Error {
  using Error::Error;
};

/// A step schedule violated the range condition required by the algorithm.
struct ScheduleViolation : Error {
  using Error::Error;
};

/// Consensus gain h lies outside (0, step_size_bound) and no override was set.
struct StepSizeViolation : Error {
  using Error::Error;
};

/// An algorithm specialized to one inequality kind received another.
struct WrongInequalityKind : Error {
  using Error::Error;
};

/// An agent state left the finite range (NaN/Inf).
struct NonFinite : Error {
  using Error::Error;
};

/// An agent state norm crossed the divergence threshold.
struct Divergence : Error {
  using Error::Error;
};

/// A runtime property check (enabled per scenario) was violated.
struct AssertionFailure : Error {
  using Error::Error;
};

/// Scenario file could not be parsed or is semantically inconsistent.
struct ScenarioError : Error {
  using Error::Error;
};

}  // namespace cfp
