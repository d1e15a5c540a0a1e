#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deepnews {

enum class ErrorKind {
  Parse,
  Conflict,
  Domain,
  Validation,
  NotFound,
  Cycle,
  Template,
  Planning,
  Config,
  Scoping,
  Decomposition,
  Transport,
  Generation,
  Assembly,
  Io,
};

std::string_view to_string(ErrorKind kind);
/// Enumerator name, e.g. "Generation".
std::string_view name(ErrorKind kind);

/// Single exception type for the whole library; `kind()` lets callers
/// (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace deepnews
