#pragma once

#include <stdexcept>
#include <string>

namespace urbanfreight {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a model function (negative counts, zero speed, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Which tour-count ceiling drove the fixed-point iteration.
enum class BindingConstraint { capacity, shift, lead_time };

inline const char* to_string(BindingConstraint c) {
  switch (c) {
    case BindingConstraint::capacity: return "capacity";
    case BindingConstraint::shift: return "shift";
    case BindingConstraint::lead_time: return "lead_time";
  }
  return "unknown";
}

/// The tour-count fixed point does not exist (or lies beyond the iteration cap).
class InfeasibleError : public Error {
 public:
  InfeasibleError(BindingConstraint constraint, const std::string& what, std::string context = {})
      : Error(context.empty() ? what : context + ": " + what),
        constraint_(constraint),
        context_(std::move(context)) {}

  BindingConstraint constraint() const noexcept { return constraint_; }
  const std::string& context() const noexcept { return context_; }

  /// Same failure, annotated with the enclosing layer or scheme.
  InfeasibleError annotated(const std::string& outer) const {
    std::string detail = what();
    return InfeasibleError(constraint_, detail, outer);
  }

 private:
  BindingConstraint constraint_;
  std::string context_;
};

/// A computed quantity violates an invariant the model should have guaranteed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Scenario / input validation failure. Carries the source location when known.
class ValidationError : public Error {
 public:
  enum class Kind { parse, missing_field, unknown_field, unresolved_reference, invariant };

  ValidationError(Kind kind, const std::string& message, std::string source = {}, int line = 0)
      : Error(format(kind, message, source, line)),
        kind_(kind),
        message_(message),
        source_(std::move(source)),
        line_(line) {}

  Kind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }
  const std::string& message() const noexcept { return message_; }

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::parse: return "parse error";
      case Kind::missing_field: return "missing field";
      case Kind::unknown_field: return "unknown field";
      case Kind::unresolved_reference: return "unresolved reference";
      case Kind::invariant: return "invariant violation";
    }
    return "error";
  }

 private:
  static std::string format(Kind kind, const std::string& message, const std::string& source,
                            int line) {
    std::string out;
    if (!source.empty()) out += source;
    if (line > 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
    if (!out.empty()) out += ": ";
    out += kind_name(kind);
    out += ": ";
    out += message;
    return out;
  }

  Kind kind_;
  std::string message_;
  std::string source_;
  int line_;
};

/// Output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace urbanfreight
