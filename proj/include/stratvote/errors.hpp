#pragma once

#include <stdexcept>
#include <string>

namespace stratvote {

// Bad argument values (non-finite increments, out-of-range thresholds, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shape mismatches between values that must agree (vector lengths).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A request for a closed form or check outside the regime where it is defined.
class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration error tied to a named field.
class ValidationError : public InvalidInput {
 public:
  ValidationError(std::string field, const std::string& message)
      : InvalidInput(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace stratvote
