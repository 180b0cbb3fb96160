#pragma once

#include <stdexcept>
#include <string>

namespace bht {

// Precondition violations on physical or structural arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sizes that do not match (potential length vs L, vector vs basis, time grids).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Occupation whose total differs from the sector particle number.
class NotInSector : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured size ceiling (sector dimension, dense solver limit, N_max) would be exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative or dense solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bht
