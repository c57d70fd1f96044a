#pragma once

#include <stdexcept>
#include <string>

namespace gsbound {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad design, missing norm, unknown name.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Parameter or observation outside the model's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Sufficient statistic on the boundary of the mean space; no finite MLE.
class MleExistenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Loss of positive definiteness, non-convergence, non-finite results.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Requested capability not available (no closed form, order too high).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Too many Monte Carlo replicates discarded.
class McThresholdError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsbound
