#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apisift {

/// Process exit codes shared by every CLI command.
enum class ExitCode : int { Ok = 0, Usage = 2, Data = 3, Internal = 4 };

/// Base of every error raised by the library. `kind()` is a stable tag used
/// in machine-readable error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message, ExitCode code = ExitCode::Data)
      : std::runtime_error(message), kind_(std::move(kind)), code_(code) {}

  const std::string& kind() const noexcept { return kind_; }
  ExitCode exit_code() const noexcept { return code_; }

 private:
  std::string kind_;
  ExitCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("ParseError", std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        detail_(message),
        line_(line),
        column_(column) {}

  /// The message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("ConfigError", message, ExitCode::Usage) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("ShapeError", message) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error("FormatError", message) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& message) : Error("IndexError", message) {}
};

class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& message) : Error("LengthMismatch", message) {}
};

class MissingLabel : public Error {
 public:
  explicit MissingLabel(const std::string& message) : Error("MissingLabel", message) {}
};

}  // namespace apisift
