#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "morreylab/geometry.hpp"
#include "morreylab/grid_function.hpp"

namespace morreylab {

/// Per-level aggregates over the full dyadic tree: level[k][flat] is the sum
/// of the transformed cell values inside that cube. Children are folded in
/// ascending corner order, so exactness arguments about summation order hold
/// uniformly across the library.
struct LevelStack {
  int dim = 1;
  int depth = 0;
  std::vector<std::vector<double>> level;

  double cube_sum(const DyadicCube& q) const {
    return level[static_cast<std::size_t>(q.level())][static_cast<std::size_t>(q.flat())];
  }
  double sum_at(int k, std::int64_t flat) const {
    return level[static_cast<std::size_t>(k)][static_cast<std::size_t>(flat)];
  }
};

template <class F>
LevelStack accumulate_cells(const GridLayout& g, F&& cell_value) {
  LevelStack s;
  s.dim = g.dim;
  s.depth = g.depth;
  s.level.resize(static_cast<std::size_t>(g.depth) + 1);
  auto& leaves = s.level[static_cast<std::size_t>(g.depth)];
  leaves.resize(static_cast<std::size_t>(g.cells()));
  for (std::int64_t i = 0; i < g.cells(); ++i) leaves[static_cast<std::size_t>(i)] = cell_value(i);
  for (int k = g.depth - 1; k >= 0; --k) {
    auto& dst = s.level[static_cast<std::size_t>(k)];
    const auto& src = s.level[static_cast<std::size_t>(k) + 1];
    dst.assign(static_cast<std::size_t>(g.cubes_at(k)), 0.0);
    for (std::int64_t j = 0; j < g.cubes_at(k + 1); ++j)
      dst[static_cast<std::size_t>(parent_flat(g.dim, k + 1, j))] += src[static_cast<std::size_t>(j)];
  }
  return s;
}

inline LevelStack accumulate(const GridFunction& f) {
  return accumulate_cells(f.layout(), [&](std::int64_t i) { return f[i]; });
}

inline LevelStack accumulate_abs(const GridFunction& f) {
  return accumulate_cells(f.layout(), [&](std::int64_t i) { return std::abs(f[i]); });
}

/// Mean of cell values over the cube: exact (sum scaled by a power of two).
inline double level_mean(const LevelStack& s, int k, std::int64_t flat) {
  return std::ldexp(s.sum_at(k, flat), -s.dim * (s.depth - k));
}

/// Integral of the accumulated quantity over the cube.
inline double cube_integral(const LevelStack& s, const GridLayout& g, int k, std::int64_t flat) {
  return s.sum_at(k, flat) * g.cell_volume();
}

}  // namespace morreylab
