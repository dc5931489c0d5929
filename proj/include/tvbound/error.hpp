#pragma once

#include <stdexcept>
#include <string>

namespace tvbound {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes or grids do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the domain an operation accepts (interval outside
/// the aperture, negative spacing, non-finite entry, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvbound
