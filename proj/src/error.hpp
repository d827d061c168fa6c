#pragma once

#include <stdexcept>
#include <string>

namespace dspec {

enum class ErrorKind {
  input,        // malformed element, dimension mismatch, bad argument
  unsupported,  // operation not defined for this group/system
  resource,     // configured budget exceeded
  partition,    // partition predicate fired zero or several times
  numerical,    // indefinite Gram matrix and similar
  setup,        // derived object failed a consistency check
  config,       // experiment config schema violation
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace dspec
