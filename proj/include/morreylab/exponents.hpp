#pragma once

#include <cmath>
#include <optional>

#include "morreylab/errors.hpp"

namespace morreylab {

/// The exponent tuple (n, p, q, lambda) with derived p' and r.
/// r satisfies 1/q = 1/r + 1/p and is defined only when q < p.
struct ExponentConfig {
  int n = 1;
  double p = 2.0;
  double q = 2.0;
  double lambda = 0.5;
  std::optional<double> a;  // the extra exponent of the a-enlarged testing condition

  void validate() const {
    if (n < 1) fail(Errc::InvalidExponents, "dimension must be positive");
    if (!(p > 1.0) || !std::isfinite(p)) fail(Errc::InvalidExponents, "p must lie in (1,inf)");
    if (!(q > 0.0) || !std::isfinite(q)) fail(Errc::InvalidExponents, "q must lie in (0,inf)");
    if (!(lambda > 0.0) || !(lambda < static_cast<double>(n)))
      fail(Errc::InvalidExponents, "lambda must lie in (0,n)");
    if (a && !(*a > 1.0)) fail(Errc::InvalidExponents, "a must exceed 1");
  }

  double pconj() const { return p / (p - 1.0); }
  bool has_r() const { return q < p; }
  double r() const {
    if (!has_r()) fail(Errc::ExponentMismatch, "r is defined only for q < p");
    return 1.0 / (1.0 / q - 1.0 / p);
  }
};

}  // namespace morreylab
