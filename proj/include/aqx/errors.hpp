#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aqx {

/// Failure categories; the CLI maps them onto process exit codes.
enum class ErrorKind {
  Config,        // exit 1
  ConstantRank,  // exit 2
  Numerical,     // exit 3
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& what)
      : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable name, e.g. "NoDescent".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string code, const std::string& what)
      : Error(ErrorKind::Config, std::move(code), what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::string code, const std::string& what)
      : Error(ErrorKind::Numerical, std::move(code), what) {}
};

/// Raised when the symbol rank differs from the reference rank.
class ConstantRankViolation : public Error {
 public:
  ConstantRankViolation(std::string code, const std::string& what,
                        std::vector<double> x, std::vector<double> lambda,
                        int observed, int expected)
      : Error(ErrorKind::ConstantRank, std::move(code), what),
        x_(std::move(x)),
        lambda_(std::move(lambda)),
        observed_(observed),
        expected_(expected) {}

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& lambda() const noexcept { return lambda_; }
  int observed_rank() const noexcept { return observed_; }
  int expected_rank() const noexcept { return expected_; }

 private:
  std::vector<double> x_;
  std::vector<double> lambda_;
  int observed_;
  int expected_;
};

/// Expression syntax error; offset is a byte offset into the source text.
class SyntaxError : public ConfigError {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : ConfigError("SyntaxError", what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
      return 1;
    case ErrorKind::ConstantRank:
      return 2;
    case ErrorKind::Numerical:
      return 3;
  }
  return 3;
}

}  // namespace aqx
