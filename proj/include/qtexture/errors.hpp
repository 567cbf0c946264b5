#ifndef QTEXTURE_ERRORS_HPP
#define QTEXTURE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtex {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied arguments that can never be valid (bad cut, wrong dims, unknown flag).
class usage_error : public error {
public:
  using error::error;
};

/// A theory's closed form does not exist for the given dimension.
class unsupported_dimension_error : public usage_error {
public:
  using usage_error::usage_error;
};

/// Request exceeds a hard enumeration or memory bound.
class resource_limit_error : public usage_error {
public:
  using usage_error::usage_error;
};

/// Input matrix or vector violates a quantum-state invariant.
class invalid_state_error : public error {
public:
  using error::error;
};

/// An iterative method failed to reach its tolerance.
class numerical_error : public error {
public:
  using error::error;
};

}  // namespace qtex

#endif
