#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlw {

enum class ErrorKind {
  invalid_domain,
  alignment,
  precondition,
  invalid_input,
  dimension_mismatch,
  singular_weight,
  degenerate_sample,
  resolution_limit,
  config,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can map it to
// an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace vlw
