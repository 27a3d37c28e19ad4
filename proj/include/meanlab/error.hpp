#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace meanlab {

enum class ErrorKind {
  OrderOutOfRange,
  OrderMismatch,
  BasePointMismatch,
  DivisionByZeroConstantTerm,
  DomainViolation,
  ParseError,
  NotPositive,
  WronskianVanishes,
  NonSmooth,
  InvalidMeasure,
  QuadratureNonFinite,
  DegenerateMeasure,
  BracketFailure,
  DegenerateDenominator,
  OutOfInterval,
  IllConditionedFit,
  NotApplicable,
  UsageError,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::BasePointMismatch: return "BasePointMismatch";
    case ErrorKind::DivisionByZeroConstantTerm: return "DivisionByZeroConstantTerm";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::WronskianVanishes: return "WronskianVanishes";
    case ErrorKind::NonSmooth: return "NonSmooth";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::QuadratureNonFinite: return "QuadratureNonFinite";
    case ErrorKind::DegenerateMeasure: return "DegenerateMeasure";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::OutOfInterval: return "OutOfInterval";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. `where()` carries
/// the offending abscissa or value when one exists (e.g. the first grid point
/// at which an admissibility check failed).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<double> where = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        where_(where) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::optional<double> where_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::vector<std::string> expected,
             const std::string& detail)
      : Error(ErrorKind::ParseError, format(position, expected, detail)),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(std::size_t pos, const std::vector<std::string>& expected,
                            const std::string& detail) {
    std::string msg = detail + " at position " + std::to_string(pos);
    if (!expected.empty()) {
      msg += "; expected one of:";
      for (const auto& e : expected) msg += " " + e;
    }
    return msg;
  }

  std::size_t position_;
  std::vector<std::string> expected_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::optional<double> where = std::nullopt) {
  throw Error(kind, message, where);
}

}  // namespace meanlab
