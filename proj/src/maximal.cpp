#include "morreylab/maximal.hpp"

#include <cmath>
#include <stdexcept>

#include "morreylab/errors.hpp"
#include "morreylab/tree.hpp"

namespace morreylab {

DyadicCube MaximalField::arg_cube(std::int64_t cell) const {
  const auto lvl = arg_level[static_cast<std::size_t>(cell)];
  if (lvl < 0) throw std::invalid_argument("cell has no maximizing cube (outside localization)");
  return DyadicCube::from_flat(base.dim(), base.depth(), cell).ancestor(lvl);
}

namespace {

// Chain entries are (level, average); the chain holds the admissible ancestors
// of the current subtree in root-to-leaf order.
struct ChainEntry {
  int level;
  double avg;
};

// out = exact max of the chain; arg = the largest cube attaining it up to the
// relative tie tolerance.
void assign_leaf(const std::vector<ChainEntry>& chain, std::int64_t cell, GridLayout const&,
                 std::vector<double>& out, std::vector<std::int16_t>& arg) {
  double best = 0.0;
  bool first = true;
  for (const auto& e : chain) {
    if (first || e.avg > best) best = e.avg;
    first = false;
  }
  if (first) return;  // no admissible cube; leave the 0 / -1 defaults
  const double cutoff = best - kMaximalTieRel * best;
  for (const auto& e : chain) {
    if (e.avg >= cutoff) {
      out[static_cast<std::size_t>(cell)] = best;
      arg[static_cast<std::size_t>(cell)] = static_cast<std::int16_t>(e.level);
      return;
    }
  }
}

void descend_plain(const GridLayout& g, const LevelStack& sums, int level, std::int64_t flat,
                   std::vector<ChainEntry>& chain, std::vector<double>& out,
                   std::vector<std::int16_t>& arg) {
  chain.push_back({level, level_mean(sums, level, flat)});
  if (level == g.depth) {
    assign_leaf(chain, flat, g, out, arg);
  } else {
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c)
      descend_plain(g, sums, level + 1, child_flat(g.dim, level, flat, c), chain, out, arg);
  }
  chain.pop_back();
}

void descend_weighted(const GridLayout& g, const LevelStack& fmu, const LevelStack& mu, int level,
                      std::int64_t flat, std::vector<ChainEntry>& chain, std::vector<double>& out,
                      std::vector<std::int16_t>& arg) {
  const double mu_sum = mu.sum_at(level, flat);
  const bool admissible = mu_sum > 0.0;
  if (admissible) chain.push_back({level, fmu.sum_at(level, flat) / mu_sum});
  if (level == g.depth) {
    assign_leaf(chain, flat, g, out, arg);
  } else {
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c)
      descend_weighted(g, fmu, mu, level + 1, child_flat(g.dim, level, flat, c), chain, out, arg);
  }
  if (admissible) chain.pop_back();
}

}  // namespace

MaximalField maximal(const GridFunction& f, const std::optional<DyadicCube>& restrict_to) {
  const auto& g = f.layout();
  DyadicCube start = restrict_to.value_or(DyadicCube::root(g.dim));
  if (start.dim() != g.dim || start.level() > g.depth)
    throw std::invalid_argument("localization cube does not fit the grid");

  const LevelStack sums = accumulate_abs(f);
  std::vector<double> out(static_cast<std::size_t>(g.cells()), 0.0);
  std::vector<std::int16_t> arg(static_cast<std::size_t>(g.cells()), -1);
  std::vector<ChainEntry> chain;
  chain.reserve(static_cast<std::size_t>(g.depth) + 1);
  descend_plain(g, sums, start.level(), start.flat(), chain, out, arg);

  MaximalField field{f, GridFunction(g, std::move(out), true), std::move(arg), restrict_to};
  return field;
}

MaximalField maximal_weighted(const GridFunction& f, const GridFunction& mu) {
  const auto& g = f.layout();
  if (!mu.layout().compatible(g)) throw std::invalid_argument("incompatible weight layout");
  if (!mu.nonneg() && mu.min_value() < 0.0) throw std::invalid_argument("mu must be nonnegative");

  const LevelStack mus = accumulate(mu);
  if (!(mus.sum_at(0, 0) > 0.0)) fail(Errc::ZeroMeasure, "mu vanishes identically");
  const LevelStack fmu =
      accumulate_cells(g, [&](std::int64_t i) { return std::abs(f[i]) * mu[i]; });

  std::vector<double> out(static_cast<std::size_t>(g.cells()), 0.0);
  std::vector<std::int16_t> arg(static_cast<std::size_t>(g.cells()), -1);
  std::vector<ChainEntry> chain;
  chain.reserve(static_cast<std::size_t>(g.depth) + 1);
  descend_weighted(g, fmu, mus, 0, 0, chain, out, arg);

  return MaximalField{f, GridFunction(g, std::move(out), true), std::move(arg), std::nullopt};
}

LevelSetDecomposition level_sets_of_maximal(const GridFunction& f, const DyadicCube& q0) {
  if (f.min_value() < 0.0) throw std::invalid_argument("level-set decomposition needs f >= 0");
  const auto field = maximal(f, q0);
  const auto& g = f.layout();

  // Group the cells of Q0 by their maximizing cube, in (level, flat) order.
  std::vector<std::pair<std::pair<int, std::int64_t>, std::int64_t>> tagged;
  for_each_cell(g, q0, [&](std::int64_t i) {
    const int lvl = field.arg_level[static_cast<std::size_t>(i)];
    const auto cube = DyadicCube::from_flat(g.dim, g.depth, i).ancestor(lvl);
    tagged.push_back({{lvl, cube.flat()}, i});
  });
  std::sort(tagged.begin(), tagged.end());

  LevelSetDecomposition dec{q0, {}};
  for (const auto& [key, cell] : tagged) {
    if (dec.sets.empty() || !(dec.sets.back().first.level() == key.first &&
                              dec.sets.back().first.flat() == key.second)) {
      dec.sets.push_back({DyadicCube::from_flat(g.dim, key.first, key.second), {}});
    }
    dec.sets.back().second.push_back(cell);
  }
  return dec;
}

}  // namespace morreylab
