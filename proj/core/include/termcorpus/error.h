#pragma once

#include <stdexcept>
#include <string>

namespace termcorpus {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is well-formed on disk but violates a data or config invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Parallel inputs do not line up (line counts, hypothesis/reference pairing).
class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A record could not be parsed (TSV column count, malformed JSONL).
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Argument outside the domain on which a function is defined.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace termcorpus
