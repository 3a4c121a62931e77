#pragma once

#include <stdexcept>
#include <string>

namespace pencilkit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input: bad shapes, non-finite entries,
/// parse failures. The CLI maps this to exit code 2.
class InputError : public Error {
public:
  using Error::Error;
};

/// A subspace was expected to lie inside another one and does not.
class ContainmentError : public Error {
public:
  using Error::Error;
};

/// An operator does not map a subspace into the requested target, so the
/// induced restriction or quotient map is not well defined.
class InvarianceError : public Error {
public:
  using Error::Error;
};

/// Two routes that must agree in exact arithmetic disagree numerically.
/// Usually means the tolerance is badly chosen for the input.
/// The CLI maps this (and the two errors above) to exit code 3.
class InconsistencyError : public Error {
public:
  using Error::Error;
};

} // namespace pencilkit
