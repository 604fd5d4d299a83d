#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shorprob {

enum class Errc {
  InvalidArgument,
  NotCoprime,
  ModulusTooLarge,
  RegisterTooSmall,
  RegisterTooLarge,
  GerjuoyInapplicable,
  Unreachable,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::ModulusTooLarge: return "ModulusTooLarge";
    case Errc::RegisterTooSmall: return "RegisterTooSmall";
    case Errc::RegisterTooLarge: return "RegisterTooLarge";
    case Errc::GerjuoyInapplicable: return "GerjuoyInapplicable";
    case Errc::Unreachable: return "Unreachable";
  }
  return "Unknown";
}

/// Contract violation on caller-supplied input. Internal invariant breaks
/// are reported with std::logic_error instead.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace shorprob
