#pragma once

#include <stdexcept>
#include <string>

namespace driftbandit {

// Base of every error the library throws. Callers that only want to abort a
// trial can catch this; the harness catches the specific subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyArmSet : public Error {
 public:
  EmptyArmSet() : Error("arm set is empty") {}
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class EmptyConfidenceSet : public Error {
 public:
  using Error::Error;
};

class UnsupportedLink : public Error {
 public:
  using Error::Error;
};

class InvalidSizes : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace driftbandit
