#pragma once

#include <stdexcept>
#include <string>

namespace stylo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing input data (corpus layout, model files, documents).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A precondition on arguments was violated (dimensions, sizes, parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A translation backend failed or was asked for an unsupported pair.
class TranslationError : public Error {
 public:
  using Error::Error;
};

}  // namespace stylo
