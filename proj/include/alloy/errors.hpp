#pragma once

#include <stdexcept>
#include <string>

namespace alloy {

/// A single Monte Carlo sample could not be evaluated (ill-conditioned solve,
/// near-resonant energy). Counted by the sampling engine, never dropped silently.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed quantity left a region that holds in exact arithmetic
/// (e.g. det Im g outside (0, (Im z)^-2]). Aborts the whole run.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The single-site potential fails the non-vanishing Fourier condition,
/// either on the continuum torus or on the discrete frequency grid of a box.
class AssumptionViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace alloy
