#pragma once

#include <stdexcept>
#include <string>

namespace forestflow {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input text (datasets, forest documents, node tables).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid model (dangling child, cycle, unknown label, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace forestflow
