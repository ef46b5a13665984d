#pragma once

#include <stdexcept>
#include <string>

namespace isac {

/// A channel specification violates one of its invariants.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Posterior requested for a feedback symbol that cannot occur under the input.
class ZeroProbabilityObservation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No input distribution satisfies the requested constraints.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every exponent of an input update is -inf.
class DegenerateUpdate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search or grid would exceed its size guard.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isac
