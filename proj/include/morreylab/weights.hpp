#pragma once

#include <string>
#include <vector>

#include "morreylab/exponents.hpp"
#include "morreylab/grid_function.hpp"
#include "morreylab/norms.hpp"

namespace morreylab {

/// Grid realization of |x - offset|^alpha. In one dimension cell values are
/// exact cell averages via the closed-form antiderivative; in higher
/// dimensions cells use midpoint evaluation, except the offset-containing
/// cell which uses a tensor quadrature of about 10^4 points.
struct PowerWeight {
  double alpha = 0.0;
  std::vector<double> offset;
  GridFunction realized;
};

PowerWeight power_weight(double alpha, const std::vector<double>& offset,
                         const GridLayout& layout);

/// [w]_{A_p} = sup_Q avg_Q(w) (avg_Q w^{-p'/p})^{p/p'} over dyadic cubes.
/// Weights with a zero cell report the infinite flag.
NormValue ap_constant(const GridFunction& w, double p);

/// [w]_{A_1} = max over cells of Mw / w (dyadic M).
NormValue a1_constant(const GridFunction& w);

enum class RangeKind { ap, cond_1_2, morrey_sharp };

struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double alpha) const {
    const bool above = lo_closed ? alpha >= lo : alpha > lo;
    const bool below = hi_closed ? alpha <= hi : alpha < hi;
    return above && below;
  }
  std::string str() const;
};

/// Closed-form admissibility ranges for power weights |x|^alpha:
///   ap:           (-n, (p-1)n)
///   cond_1_2:     [lambda-n, (p-1)n)
///   morrey_sharp: [lambda-n, lambda+(p-1)n)
AlphaInterval admissible_range(RangeKind kind, const ExponentConfig& cfg);

/// sup over dyadic pairs Q inside Q' of
///   (w(Q)/ell(Q)^lambda) (ell(Q')^lambda/|Q'|) (avg_{Q'} w^{-p'/p})^{p/p'}.
/// On the dyadic family this coincides with the one-cube form built from
/// ||w 1_Q||_{L^{1,lambda}}. Witness = outer cube, witness2 = inner cube.
NormValue cond_1_2_value(const GridFunction& w, const ExponentConfig& cfg);

}  // namespace morreylab
