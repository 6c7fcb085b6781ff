#pragma once

#include <stdexcept>
#include <string>

namespace mimo {

/// Caller supplied arguments that violate an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A singular value needed for a stream is zero or below the rank tolerance.
class RankDeficiency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative kernel did not converge within its iteration budget.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query (e.g. interpolation target) lies outside the data it is asked about.
class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace mimo
