#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace privrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON, CSV, snapshot payload).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain invariant. `subject` names the offending
/// entity (setting id, field name, "weights", ...).
class ValidationError : public Error {
 public:
  ValidationError(std::string subject, const std::string& reason)
      : Error(subject + ": " + reason), subject_(std::move(subject)), reason_(reason) {}

  const std::string& subject() const noexcept { return subject_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string subject_;
  std::string reason_;
};

struct FieldError {
  std::string field;
  std::string message;
};

/// Intake validation failed; carries one entry per offending field.
class IntakeError : public Error {
 public:
  explicit IntakeError(std::vector<FieldError> errors)
      : Error(describe(errors)), errors_(std::move(errors)) {}
  IntakeError(std::string field, std::string message)
      : IntakeError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  static std::string describe(const std::vector<FieldError>& errors) {
    std::string out = "invalid intake";
    for (const auto& e : errors) out += "; " + e.field + ": " + e.message;
    return out;
  }

  std::vector<FieldError> errors_;
};

/// Fewer reference records than the neighbour count requires.
class InsufficientDataError : public Error {
 public:
  InsufficientDataError(std::size_t available, std::size_t required)
      : Error("insufficient data: " + std::to_string(available) + " records after filtering, " +
              std::to_string(required) + " required (short by " +
              std::to_string(required - available) + ")"),
        available_(available),
        required_(required) {}

  std::size_t available() const noexcept { return available_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t available_;
  std::size_t required_;
};

/// A statistic is undefined for the given input (constant series, n < 3).
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

}  // namespace privrec
