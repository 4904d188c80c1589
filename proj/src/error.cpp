#include "error.hpp"

namespace atomnc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kNumerical: return "numerical failure";
    case ErrorKind::kUnsupported: return "unsupported configuration";
    case ErrorKind::kIo: return "i/o error";
  }
  return "unknown";
}

void throw_invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::kInvalidArgument, "invalid parameter '" + field + "': " + why);
}

void throw_numerical(const std::string& what) {
  throw Error(ErrorKind::kNumerical, what);
}

void rethrow_in_stage(const std::string& stage, const Error& e) {
  throw Error(e.kind(), "[" + stage + "] " + e.what());
}

}  // namespace atomnc
