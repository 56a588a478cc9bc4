#pragma once

#include <stdexcept>
#include <string>

namespace morreylab {

// Numeric-domain failures surfaced to callers; the CLI maps them to exit code 1
// and prints the error name.
enum class Errc {
  ZeroMeasure,
  InvalidAlpha,
  InvalidExponents,
  EmptyCandidates,
  DegenerateBasis,
  ZeroSigma,
  ExponentMismatch,
  DegenerateDenominator,
  NonIntegrable,
};

const char* errc_name(Errc code) noexcept;

class DomainError : public std::runtime_error {
 public:
  DomainError(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }
  const char* name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
  throw DomainError(code, detail);
}

}  // namespace morreylab
