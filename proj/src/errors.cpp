#include "morreylab/errors.hpp"

namespace morreylab {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroMeasure: return "ZeroMeasure";
    case Errc::InvalidAlpha: return "InvalidAlpha";
    case Errc::InvalidExponents: return "InvalidExponents";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::DegenerateBasis: return "DegenerateBasis";
    case Errc::ZeroSigma: return "ZeroSigma";
    case Errc::ExponentMismatch: return "ExponentMismatch";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::NonIntegrable: return "NonIntegrable";
  }
  return "UnknownError";
}

}  // namespace morreylab
