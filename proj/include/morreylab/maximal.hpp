#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "morreylab/grid_function.hpp"

namespace morreylab {

// Relative tolerance for deciding that two cube averages tie when assigning a
// maximizing cube; ties go to the largest cube (smallest level).
inline constexpr double kMaximalTieRel = 1e-12;

/// Result of a dyadic maximal-operator pass: for each finest cell, the exact
/// supremum of |f|-averages over dyadic cubes containing it, plus the level of
/// a maximizing cube (largest wins on ties). For a localized pass, cells
/// outside the localization cube carry 0 and level -1.
struct MaximalField {
  GridFunction base;
  GridFunction out;
  std::vector<std::int16_t> arg_level;
  std::optional<DyadicCube> restrict_to;

  DyadicCube arg_cube(std::int64_t cell) const;
};

/// Exact dyadic Hardy-Littlewood maximal operator, computed in one
/// root-to-leaf pass carrying the running chain of ancestor averages.
/// With `restrict_to`, the supremum runs over dyadic cubes inside that cube
/// only, which on the cube coincides with the maximal function of f*1_Q.
MaximalField maximal(const GridFunction& f, const std::optional<DyadicCube>& restrict_to = {});

/// mu-weighted dyadic maximal operator; cubes with mu(Q)=0 are skipped.
/// Throws ZeroMeasure when mu vanishes identically.
MaximalField maximal_weighted(const GridFunction& f, const GridFunction& mu);

/// The level-selection decomposition of M[f 1_{Q0}] on Q0: for each dyadic
/// Q inside Q0 the set E(Q) of cells whose maximal value is attained at Q and
/// at no strictly larger cube inside Q0. The E(Q) are pairwise disjoint and
///   M[f 1_{Q0}] = sum_Q avg_Q(f) 1_{E(Q)}   on Q0.
struct LevelSetDecomposition {
  DyadicCube q0;
  std::vector<std::pair<DyadicCube, std::vector<std::int64_t>>> sets;  // nonempty E(Q) only
};

LevelSetDecomposition level_sets_of_maximal(const GridFunction& f, const DyadicCube& q0);

}  // namespace morreylab
