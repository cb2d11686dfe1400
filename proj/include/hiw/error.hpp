#pragma once

#include <stdexcept>
#include <string>

namespace hiw {

/// Category attached to every library error so callers (and the CLI exit
/// code policy) can react without parsing messages.
enum class ErrorKind {
  InvalidArgument,
  Pole,
  Domain,
  Truncation,
  IllConditioned,
  Degeneracy,
  Inconsistency,
  Indeterminate,
  Region,
  NotInE,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Gamma pole at a nonpositive integer.
class PoleError : public Error {
 public:
  explicit PoleError(long at)
      : Error(ErrorKind::Pole, "pole at nonpositive integer " + std::to_string(at)),
        at_(at) {}
  long at() const noexcept { return at_; }

 private:
  long at_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace hiw
