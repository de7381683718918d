#pragma once

#include <stdexcept>
#include <string>

namespace netcoh {

/// Precondition violated by caller-supplied data (bad ids, wrong sizes, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The penalized system has no unique solution (the covariates contain a
/// direction the cohesion penalty does not see). Adding a ridge fixes it.
class EstimatorDoesNotExist : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistical failure on otherwise well-formed input, e.g. no events.
class ModelFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netcoh
