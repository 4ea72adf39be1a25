#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ihho {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  Label,
  ClassTooSmall,
  DegenerateData,
  BadFn,
  MinorityCollapsed,
  KTooLarge,
  TooFewMinority,
  NoDangerPoints,
  TieClassCounts,
  LengthMismatch,
  OneClassOnly,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Label: return "LabelError";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::BadFn: return "BadFn";
    case ErrorKind::MinorityCollapsed: return "MinorityCollapsed";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::TooFewMinority: return "TooFewMinority";
    case ErrorKind::NoDangerPoints: return "NoDangerPoints";
    case ErrorKind::TieClassCounts: return "TieClassCounts";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::OneClassOnly: return "OneClassOnly";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input text. `line` is 1-based; `column` names the offending field
/// (header name for CSV, attribute name for KEEL) or is empty when the whole
/// line is at fault.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string column, const std::string& reason)
      : Error(ErrorKind::Parse, format(line, column, reason)),
        line_(line),
        column_(std::move(column)),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  static std::string format(std::size_t line, const std::string& column, const std::string& reason) {
    std::string out = "line " + std::to_string(line);
    if (!column.empty()) out += ", column '" + column + "'";
    return out + ": " + reason;
  }

  std::size_t line_;
  std::string column_;
  std::string reason_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::InvalidArgument, message);
}

}  // namespace ihho
