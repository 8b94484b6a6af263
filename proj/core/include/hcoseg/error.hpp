#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hcoseg {

// Failure categories surfaced to callers; the CLI maps them to exit codes.
enum class Errc {
  io,          // missing, unreadable or unwritable file
  format,      // malformed file contents (bad magic, truncated payload, ...)
  dimension,   // size mismatch between rasters that must agree
  range,       // value outside its allowed interval
  validation,  // inconsistent arguments or configuration
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hcoseg
