#pragma once

#include <stdexcept>
#include <string>

namespace aloha {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The HOL phase chain has no proper limit (K unbounded with p + q <= 1).
class NoStationaryDistribution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No equilibrium root exists where one was requested.
class NoEquilibrium : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The finite-n unsaturated map was evaluated at p_t <= lambda; the caller
/// should switch to the saturated map.
class SaturationOnset : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root could not be bracketed, or more than one sign change was found.
/// The message carries the scanned sign pattern.
class BracketingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stability bound has no solution for the given configuration.
class RegionDegenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empirical quantities were requested from a run flagged as diverged.
class DivergedRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aloha
