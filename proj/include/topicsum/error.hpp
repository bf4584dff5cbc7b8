#pragma once

#include <stdexcept>
#include <string>

namespace topicsum {

/// Failure categories; the CLI maps these onto process exit codes.
enum class ErrorKind {
  invalid_argument,  // caller violated a documented precondition
  config,            // bad configuration or usage
  missing_artifact,  // an upstream file that a stage depends on is absent
  format,            // a persisted file is missing or corrupt
  fetch,             // network acquisition failed
  runtime,           // anything else
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::config: return "config";
    case ErrorKind::missing_artifact: return "missing_artifact";
    case ErrorKind::format: return "format";
    case ErrorKind::fetch: return "fetch";
    case ErrorKind::runtime: return "runtime";
  }
  return "runtime";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace topicsum
