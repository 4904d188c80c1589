#pragma once

#include <stdexcept>
#include <string>

namespace atomnc {

enum class ErrorKind {
  kInvalidArgument,
  kNumerical,
  kUnsupported,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this exception type. The kind
// maps one-to-one onto the status codes of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_invalid(const std::string& field, const std::string& why);
[[noreturn]] void throw_numerical(const std::string& what);

// Re-throws `e` with "[stage] " prepended, keeping its kind.
[[noreturn]] void rethrow_in_stage(const std::string& stage, const Error& e);

}  // namespace atomnc
