#include "morreylab/content.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "morreylab/errors.hpp"
#include "morreylab/maximal.hpp"
#include "morreylab/tree.hpp"
#include "morreylab/weights.hpp"

namespace morreylab {

CellSet CellSet::from_indices(const GridLayout& g, const std::vector<std::int64_t>& cells) {
  CellSet s = none(g);
  for (auto i : cells) {
    if (i < 0 || i >= g.cells()) throw std::invalid_argument("cell index out of range");
    s.mask[static_cast<std::size_t>(i)] = 1;
  }
  return s;
}

CellSet CellSet::above(const GridFunction& f, double t) {
  CellSet s = none(f.layout());
  for (std::int64_t i = 0; i < f.size(); ++i)
    if (f[i] > t) s.mask[static_cast<std::size_t>(i)] = 1;
  return s;
}

std::int64_t CellSet::count() const {
  std::int64_t n = 0;
  for (auto b : mask) n += b;
  return n;
}

bool CellSet::subset_of(const CellSet& o) const {
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && !o.mask[i]) return false;
  return true;
}

CellSet CellSet::unioned(const CellSet& o) const {
  CellSet s = *this;
  for (std::size_t i = 0; i < mask.size(); ++i) s.mask[i] = mask[i] | o.mask[i];
  return s;
}

CellSet CoverResult::cover_cells(const GridLayout& g) const {
  CellSet s = CellSet::none(g);
  for (const auto& q : cover)
    for_each_cell(g, q, [&](std::int64_t i) { s.mask[static_cast<std::size_t>(i)] = 1; });
  return s;
}

CoverResult hausdorff_content(const CellSet& E, double alpha) {
  const auto& g = E.layout;
  if (!(alpha > 0.0) || !(alpha <= static_cast<double>(g.dim)))
    fail(Errc::InvalidAlpha, "content exponent must lie in (0, n]");

  CoverResult result;
  result.alpha = alpha;
  if (!E.any()) return result;

  const LevelStack counts =
      accumulate_cells(g, [&](std::int64_t i) { return E.contains(i) ? 1.0 : 0.0; });

  // h[k][i]: optimal dyadic cover cost of E within the cube, folded bottom-up
  // with children in ascending corner order.
  std::vector<std::vector<double>> h(static_cast<std::size_t>(g.depth) + 1);
  for (int k = g.depth; k >= 0; --k) {
    auto& hk = h[static_cast<std::size_t>(k)];
    hk.assign(static_cast<std::size_t>(g.cubes_at(k)), 0.0);
    const double take = std::pow(g.side_at(k), alpha);
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      if (!(counts.sum_at(k, i) > 0.0)) continue;
      if (k == g.depth) {
        hk[static_cast<std::size_t>(i)] = take;
        continue;
      }
      double split = 0.0;
      const int corners = 1 << g.dim;
      for (int c = 0; c < corners; ++c)
        split += h[static_cast<std::size_t>(k) + 1]
                  [static_cast<std::size_t>(child_flat(g.dim, k, i, c))];
      hk[static_cast<std::size_t>(i)] = take <= split ? take : split;
    }
  }
  result.value = h[0][0];

  // Backtrack: take the cube whenever doing so is no worse than splitting.
  std::vector<std::pair<int, std::int64_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [k, i] = stack.back();
    stack.pop_back();
    if (!(counts.sum_at(k, i) > 0.0)) continue;
    const double take = std::pow(g.side_at(k), alpha);
    if (k == g.depth || take <= h[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]) {
      result.cover.push_back(DyadicCube::from_flat(g.dim, k, i));
      continue;
    }
    const int corners = 1 << g.dim;
    for (int c = corners - 1; c >= 0; --c)
      stack.push_back({k + 1, child_flat(g.dim, k, i, c)});
  }
  return result;
}

double choquet_integral(const GridFunction& phi, double alpha) {
  if (phi.min_value() < 0.0) throw std::invalid_argument("Choquet integral needs phi >= 0");
  const auto& g = phi.layout();
  if (!(alpha > 0.0) || !(alpha <= static_cast<double>(g.dim)))
    fail(Errc::InvalidAlpha, "content exponent must lie in (0, n]");

  std::vector<double> ts(phi.values().begin(), phi.values().end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  double total = 0.0;
  double prev = 0.0;
  for (double t : ts) {
    if (!(t > 0.0)) continue;
    total += (t - prev) * hausdorff_content(CellSet::above(phi, prev), alpha).value;
    prev = t;
  }
  return total;
}

namespace {

double a1_of(const GridFunction& w) {
  const auto mw = maximal(w);
  double best = 0.0;
  for (std::int64_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) return std::numeric_limits<double>::infinity();
    best = std::max(best, mw.out[i] / w[i]);
  }
  return best;
}

}  // namespace

double b1_normalizer(const DyadicCube& q, const GridLayout& layout, double lambda,
                     double lambda0) {
  const auto m1 = maximal(indicator(layout, q));
  const double e = lambda0 / static_cast<double>(layout.dim);
  const double scale = std::pow(q.side(layout.box), lambda);
  const GridFunction raw =
      m1.out.cellwise([e, scale](double v) { return std::pow(v, e) / scale; }, true);
  return choquet_integral(raw, lambda);
}

BasisCandidate make_b1(const DyadicCube& q, const GridLayout& layout, double lambda,
                       double lambda0) {
  const double n = static_cast<double>(layout.dim);
  if (!(0.0 < lambda && lambda < lambda0 && lambda0 < n))
    fail(Errc::InvalidExponents, "b1 needs 0 < lambda < lambda0 < n");
  if (q.dim() != layout.dim || q.level() > layout.depth)
    throw std::invalid_argument("b1 cube does not fit the grid");

  const auto m1 = maximal(indicator(layout, q));
  const double e = lambda0 / n;
  const double scale = std::pow(q.side(layout.box), lambda);
  GridFunction raw = m1.out.cellwise([e, scale](double v) { return std::pow(v, e) / scale; }, true);
  const double c = choquet_integral(raw, lambda);
  GridFunction b = raw.cellwise([c](double v) { return v / c; }, true);

  char tag[96];
  std::snprintf(tag, sizeof tag, "b1(level=%d,index=%lld,lambda0=%g)", q.level(),
                static_cast<long long>(q.flat()), lambda0);
  return BasisCandidate{b, a1_of(b), choquet_integral(b, lambda), tag};
}

double b2_continuum_choquet(double lambda, double lambda1, double d) {
  if (!(0.0 < lambda1 && lambda1 < lambda))
    fail(Errc::InvalidExponents, "closed form requires 0 < lambda1 < lambda");
  const double s = lambda / lambda1;
  return s / (s - 1.0) * std::pow(2.0 * d, lambda - lambda1);
}

BasisCandidate make_b2(const GridLayout& layout, double lambda, double lambda1, double d) {
  const double n = static_cast<double>(layout.dim);
  if (!(lambda > 0.0) || !(lambda < n)) fail(Errc::InvalidExponents, "b2 needs lambda in (0,n)");
  if (!(lambda1 > 0.0) || !(lambda1 < n) || lambda1 == lambda)
    fail(Errc::InvalidExponents, "b2 needs lambda1 in (0,n) distinct from lambda");
  if (!(d > 0.0)) throw std::invalid_argument("b2 needs a positive ball parameter d");

  const std::vector<double> origin(static_cast<std::size_t>(layout.dim), 0.0);
  const PowerWeight pw = power_weight(-lambda1, origin, layout);
  const double radius = 2.0 * d;
  GridFunction raw = GridFunction::of(
      layout,
      [&](std::int64_t i) {
        double r2 = 0.0;
        for (int a = 0; a < layout.dim; ++a) {
          const double c = layout.cell_center(i, a);
          r2 += c * c;
        }
        return std::sqrt(r2) < radius ? pw.realized[i] : 0.0;
      },
      true);
  if (!(raw.max_value() > 0.0))
    throw std::invalid_argument("b2 ball does not meet the root box");
  const double c = choquet_integral(raw, lambda);
  GridFunction b = raw.cellwise([c](double v) { return v / c; }, true);

  char tag[96];
  std::snprintf(tag, sizeof tag, "b2(lambda1=%g,d=%g)", lambda1, d);
  return BasisCandidate{b, a1_of(pw.realized), choquet_integral(b, lambda), tag};
}

std::vector<BasisCandidate> default_roster(const GridLayout& layout, double lambda) {
  const double n = static_cast<double>(layout.dim);
  const double lambda0 = (lambda + n) / 2.0;
  std::vector<BasisCandidate> roster;
  const int top = std::min(3, layout.depth);
  for (int k = 0; k <= top; ++k)
    for (std::int64_t i = 0; i < layout.cubes_at(k); ++i)
      roster.push_back(make_b1(DyadicCube::from_flat(layout.dim, k, i), layout, lambda, lambda0));
  for (double lambda1 : {1.5 * lambda, 2.0 * lambda}) {
    if (!(lambda1 > lambda) || !(lambda1 < n)) continue;
    for (double d : {0.25, 0.5}) roster.push_back(make_b2(layout, lambda, lambda1, d * layout.box.scale));
  }
  return roster;
}

}  // namespace morreylab
