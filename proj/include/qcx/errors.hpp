#pragma once

#include <stdexcept>

namespace qcx {

/// Bad shape, index or parameter passed to a library call.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input sits on a set where a construction has no closed form (zero determinant, dependent rows).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical search ran out of candidates or failed to bracket.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A construction produced output that violates its own post-condition.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qcx
