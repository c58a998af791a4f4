#pragma once

#include <stdexcept>
#include <string>

namespace polyshoot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidControls : public Error {
 public:
  using Error::Error;
};

class NonPositiveAlpha : public Error {
 public:
  using Error::Error;
};

// Integrator failures. Both mean the controls need retuning.
class StepLimitExceeded : public Error {
 public:
  using Error::Error;
};

class StiffnessFailure : public Error {
 public:
  using Error::Error;
};

class MassExceeded : public Error {
 public:
  using Error::Error;
};

class InconsistentBoundary : public Error {
 public:
  using Error::Error;
};

class AllUnresolved : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class WindowTooShort : public Error {
 public:
  using Error::Error;
};

}  // namespace polyshoot
