#pragma once

// Brute-force reference implementations used only by tests. They share no
// scanning or recursion logic with the library: maximal values come from
// direct enumeration of ancestor cubes with flat-order summation, and content
// values from explicit enumeration of every dyadic cover.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "morreylab/content.hpp"
#include "morreylab/grid_function.hpp"

namespace oracle {

using morreylab::CellSet;
using morreylab::DyadicCube;
using morreylab::GridFunction;
using morreylab::GridLayout;

// Average of |f| over the cube by direct flat-order cell summation.
inline double cube_abs_average(const GridFunction& f, const DyadicCube& q) {
  double sum = 0.0;
  std::int64_t count = 0;
  morreylab::for_each_cell(f.layout(), q, [&](std::int64_t i) {
    sum += std::abs(f[i]);
    ++count;
  });
  return sum / static_cast<double>(count);
}

// Dyadic maximal function of |f| at one cell: max over the ancestor chain.
inline double brute_maximal_at(const GridFunction& f, std::int64_t cell,
                               const DyadicCube* localize = nullptr) {
  const auto& g = f.layout();
  const auto leaf = DyadicCube::from_flat(g.dim, g.depth, cell);
  double best = -std::numeric_limits<double>::infinity();
  bool seen = false;
  for (int lvl = 0; lvl <= g.depth; ++lvl) {
    const auto anc = leaf.ancestor(lvl);
    if (localize && !localize->contains(anc)) continue;
    best = seen ? std::max(best, cube_abs_average(f, anc)) : cube_abs_average(f, anc);
    seen = true;
  }
  return seen ? best : 0.0;
}

inline std::vector<double> brute_maximal(const GridFunction& f,
                                         const DyadicCube* localize = nullptr) {
  std::vector<double> out(static_cast<std::size_t>(f.size()), 0.0);
  for (std::int64_t i = 0; i < f.size(); ++i) {
    if (localize) {
      const auto leaf = DyadicCube::from_flat(f.dim(), f.depth(), i);
      if (!localize->contains(leaf)) continue;
    }
    out[static_cast<std::size_t>(i)] = brute_maximal_at(f, i, localize);
  }
  return out;
}

// mu-weighted maximal function at one cell by direct enumeration.
inline double brute_weighted_maximal_at(const GridFunction& f, const GridFunction& mu,
                                        std::int64_t cell) {
  const auto& g = f.layout();
  const auto leaf = DyadicCube::from_flat(g.dim, g.depth, cell);
  double best = 0.0;
  bool seen = false;
  for (int lvl = 0; lvl <= g.depth; ++lvl) {
    const auto anc = leaf.ancestor(lvl);
    double num = 0.0, den = 0.0;
    morreylab::for_each_cell(g, anc, [&](std::int64_t i) {
      num += std::abs(f[i]) * mu[i];
      den += mu[i];
    });
    if (!(den > 0.0)) continue;
    const double avg = num / den;
    best = seen ? std::max(best, avg) : avg;
    seen = true;
  }
  return best;
}

// All dyadic covers of E within the cube, enumerated explicitly as choice
// trees; each cover's cost is computed by the recursion that produced it.
struct CoverEnum {
  const GridLayout& g;
  const CellSet& E;
  double alpha;

  bool meets(const DyadicCube& q) const {
    bool hit = false;
    morreylab::for_each_cell(g, q, [&](std::int64_t i) { hit = hit || E.contains(i); });
    return hit;
  }

  // Returns the costs of every cover of E restricted to q.
  std::vector<double> costs(const DyadicCube& q) const {
    if (!meets(q)) return {0.0};
    const double take = std::pow(q.side(g.box), alpha);
    if (q.level() == g.depth) return {take};
    std::vector<double> totals{0.0};
    for (const auto& child : q.children()) {
      const auto child_costs = costs(child);
      std::vector<double> next;
      next.reserve(totals.size() * child_costs.size());
      for (double t : totals)
        for (double c : child_costs) next.push_back(t + c);
      totals = std::move(next);
    }
    totals.push_back(take);
    return totals;
  }
};

inline double brute_content(const CellSet& E, double alpha) {
  if (!E.any()) return 0.0;
  CoverEnum en{E.layout, E, alpha};
  const auto costs = en.costs(DyadicCube::root(E.layout.dim));
  return *std::min_element(costs.begin(), costs.end());
}

// Random nonnegative grid function on the dyadic lattice (exact sums).
inline GridFunction random_lattice(const GridLayout& g, morreylab::Rng& rng, int bits = 12,
                                   double zero_fraction = 0.25) {
  std::vector<double> v(static_cast<std::size_t>(g.cells()));
  for (auto& x : v) x = rng.unit() < zero_fraction ? 0.0 : rng.lattice(bits);
  return GridFunction(g, std::move(v), true);
}

// Strictly positive lattice values in (0, 1]; still exactly summable.
inline GridFunction random_positive(const GridLayout& g, morreylab::Rng& rng, int bits = 12) {
  std::vector<double> v(static_cast<std::size_t>(g.cells()));
  for (auto& x : v) x = rng.lattice(bits) + std::ldexp(1.0, -bits);
  return GridFunction(g, std::move(v), true);
}

}  // namespace oracle
