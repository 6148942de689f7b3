#pragma once

#include <stdexcept>
#include <string>

namespace lammos {

/// Base class for every error raised by the model.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spec value violates its invariants (non-positive length, unsorted anchors...).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// An input lies outside the range a model is defined on (no extrapolation).
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// A component would be loaded past its rated limit.
class Overload : public Error {
 public:
  using Error::Error;
};

/// An operation was requested in a state that does not allow it.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace lammos
