#pragma once

#include <stdexcept>
#include <string>

namespace pir {

enum class Errc {
  configuration,
  arithmetic,
  domain,
  phase,
  exceptional_point,
  conditioning,
  fit,
  comparison,
  io,
  internal,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace pir
