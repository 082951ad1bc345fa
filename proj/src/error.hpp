#pragma once

#include <stdexcept>
#include <string>

namespace nscond {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed a value outside an operation's contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A field or function was evaluated where it is not defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nscond
