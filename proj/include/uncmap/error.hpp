#pragma once

#include <stdexcept>
#include <string>

namespace uncmap {

// Every error carries a stable machine-readable code next to its message.
// The API maps codes onto HTTP status; the CLI maps them onto exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config_error", m) {}
};

struct NotFoundError : Error {
  explicit NotFoundError(const std::string& m) : Error("not_found", m) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error("validation_error", m) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& m) : Error("invalid_argument", m) {}
};

struct BadRequest : Error {
  explicit BadRequest(const std::string& m) : Error("bad_request", m) {}
};

struct CapabilityError : Error {
  explicit CapabilityError(const std::string& m) : Error("capability_mismatch", m) {}
};

struct CombinationUndefined : Error {
  explicit CombinationUndefined(const std::string& m) : Error("combination_undefined", m) {}
};

struct TimeoutError : Error {
  explicit TimeoutError(const std::string& m) : Error("timeout", m) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& m) : Error("internal_error", m) {}
};

}  // namespace uncmap
