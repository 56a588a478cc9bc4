#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morreylab/grid_function.hpp"

namespace morreylab {

/// A set of finest-level cells, as a dense mask.
struct CellSet {
  GridLayout layout{};
  std::vector<std::uint8_t> mask;

  static CellSet none(const GridLayout& g) {
    return CellSet{g, std::vector<std::uint8_t>(static_cast<std::size_t>(g.cells()), 0)};
  }
  static CellSet from_indices(const GridLayout& g, const std::vector<std::int64_t>& cells);
  /// { cells : f > t }
  static CellSet above(const GridFunction& f, double t);

  bool contains(std::int64_t i) const { return mask[static_cast<std::size_t>(i)] != 0; }
  std::int64_t count() const;
  bool any() const { return count() > 0; }
  bool subset_of(const CellSet& o) const;
  CellSet unioned(const CellSet& o) const;
};

/// Dyadic Hausdorff content value plus a minimizing disjoint dyadic cover.
struct CoverResult {
  double value = 0.0;
  std::vector<DyadicCube> cover;
  double alpha = 0.0;

  CellSet cover_cells(const GridLayout& g) const;
};

/// Exact minimum of sum ell(Q_j)^alpha over dyadic covers of E, by the
/// bottom-up recursion h(Q) = 0 if Q does not meet E, else
/// min(ell(Q)^alpha, sum over children). Ties prefer the single larger cube,
/// which makes covers of nested sets nested. The witness cover is recovered
/// by backtracking and is pairwise disjoint.
CoverResult hausdorff_content(const CellSet& E, double alpha);

/// Layer-cake integral of phi >= 0 against the dyadic content H^alpha:
/// exact sum of (t_i - t_{i-1}) * H^alpha({phi > t_{i-1}}) over the sorted
/// distinct positive values t_i of phi.
double choquet_integral(const GridFunction& phi, double alpha);

/// A candidate element of the weight basis: an A_1-type weight normalized so
/// that its computed dyadic Choquet integral of order lambda equals 1.
struct BasisCandidate {
  GridFunction b;
  double a1_const = 0.0;   // Mb/b supremum (for the ball-cut family, of the underlying power weight)
  double choquet = 0.0;    // recomputed integral of the normalized candidate; ~1
  std::string tag;
};

/// Normalized candidate  M[1_Q]^{lambda0/n} / ell(Q)^lambda / (choquet factor).
/// Requires 0 < lambda < lambda0 < n.
BasisCandidate make_b1(const DyadicCube& q, const GridLayout& layout, double lambda,
                       double lambda0);

/// Normalized candidate  |x|^{-lambda1} 1_{|x|<2d} / (choquet factor).
/// Requires lambda1 in (0,n) with lambda1 != lambda; d in absolute units.
/// The reported a1_const is that of the uncut power weight.
BasisCandidate make_b2(const GridLayout& layout, double lambda, double lambda1, double d);

/// Closed-form continuum Choquet integral of |x|^{-lambda1} 1_{|x|<2d} against
/// H^lambda, valid for lambda1 < lambda (it diverges otherwise):
///   (lambda/lambda1) / (lambda/lambda1 - 1) * (2d)^{lambda - lambda1}.
double b2_continuum_choquet(double lambda, double lambda1, double d);

/// Normalization factor of make_b1: the computed Choquet integral of
/// M[1_Q]^{lambda0/n} / ell(Q)^lambda against H^lambda.
double b1_normalizer(const DyadicCube& q, const GridLayout& layout, double lambda, double lambda0);

/// Default candidate library: b1 over all cubes at levels 0..min(3,depth) with
/// lambda0 = (lambda+n)/2, plus b2 for lambda1 in {1.5 lambda, 2 lambda}
/// intersected with (lambda, n) and d in {1/4, 1/2} of the box scale.
std::vector<BasisCandidate> default_roster(const GridLayout& layout, double lambda);

}  // namespace morreylab
