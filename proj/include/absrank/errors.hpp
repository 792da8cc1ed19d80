#pragma once

#include <stdexcept>
#include <string>

namespace absrank {

// Base class for everything wrong with user-supplied data or parameters.
// Tools map DataError to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: unparseable cells, non-finite numbers, bad JSON.
class ParseError : public DataError {
 public:
  explicit ParseError(const std::string& what) : DataError(what) {}
};

// Structurally inconsistent input: ragged rows, empty matrices.
class ShapeError : public DataError {
 public:
  explicit ShapeError(const std::string& what) : DataError(what) {}
};

// Duplicate or unknown row/column labels.
class LabelError : public DataError {
 public:
  explicit LabelError(const std::string& what) : DataError(what) {}
};

// Parameter or argument outside the mathematical domain of an operation.
class DomainError : public DataError {
 public:
  explicit DomainError(const std::string& what) : DataError(what) {}
};

// Too few rows, samples, or distinct values to proceed.
class SizeError : public DataError {
 public:
  explicit SizeError(const std::string& what) : DataError(what) {}
};

// Corrupt or incompatible serialized artifacts.
class FormatError : public DataError {
 public:
  explicit FormatError(const std::string& what) : DataError(what) {}
};

// Request is valid but beyond what this build supports (dimension past the
// direction-number table, exponential enumerations past the size cap,
// convolution over unbounded support).  Tools map this to exit code 4.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace absrank
