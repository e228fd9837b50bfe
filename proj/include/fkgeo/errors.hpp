#pragma once

#include <stdexcept>
#include <string>

namespace fkgeo {

// Expression evaluated outside its domain (log of non-positive value,
// division by zero, point outside the chart box where required).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Metric failed to factorize (not positive definite at the point).
class SingularMetric : public std::runtime_error {
 public:
  explicit SingularMetric(const std::string& what) : std::runtime_error(what) {}
};

// Invalid builder / operation parameter.
class InvalidParam : public std::runtime_error {
 public:
  explicit InvalidParam(const std::string& what) : std::runtime_error(what) {}
};

// Operation requires a specific dimension (e.g. dim-3 Ricci formula).
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Operation does not apply to this model (missing contact structure,
// non-constant f where a constant-f formula is requested, ...).
class NotApplicable : public std::runtime_error {
 public:
  explicit NotApplicable(const std::string& what) : std::runtime_error(what) {}
};

// Transport integrator failed its metric-preservation self check.
class StepTooCoarse : public std::runtime_error {
 public:
  explicit StepTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

// Singular-value spectrum has no clean retained/discarded split; the
// nullspace dimension cannot be called reliably.
class GapTooSmall : public std::runtime_error {
 public:
  GapTooSmall(const std::string& what, double ratio)
      : std::runtime_error(what), gap_ratio(ratio) {}
  double gap_ratio;
};

// A tensor claimed parallel drifted under loop transport.
class TransportInconsistent : public std::runtime_error {
 public:
  TransportInconsistent(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

// Ricci tensor numerically singular; the SWRS 1-form is not identifiable.
class DegenerateRicci : public std::runtime_error {
 public:
  DegenerateRicci(const std::string& what, int rank)
      : std::runtime_error(what), rank(rank) {}
  int rank;
};

// Run configuration violated the schema.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fkgeo
