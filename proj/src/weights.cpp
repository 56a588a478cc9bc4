#include "morreylab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "morreylab/maximal.hpp"
#include "morreylab/tree.hpp"

namespace morreylab {

namespace {

// Antiderivative of |t|^alpha, continuous through 0 for alpha > -1.
double power_antiderivative(double t, double alpha) {
  const double e = alpha + 1.0;
  return (t >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(t), e) / e;
}

double quadrature_cell_average(const GridLayout& g, std::int64_t cell, double alpha,
                               const std::vector<double>& offset) {
  const int per_axis = static_cast<int>(std::ceil(std::pow(1e4, 1.0 / g.dim)));
  const double h = g.side_at(g.depth);
  const auto m = decode_coords(g.dim, g.depth, cell);
  std::vector<int> idx(static_cast<std::size_t>(g.dim), 0);
  double sum = 0.0;
  std::int64_t points = 1;
  for (int a = 0; a < g.dim; ++a) points *= per_axis;
  for (std::int64_t pt = 0; pt < points; ++pt) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double x = g.box.offset_at(a) +
                       h * (static_cast<double>(m[static_cast<std::size_t>(a)]) +
                            (idx[static_cast<std::size_t>(a)] + 0.5) / per_axis);
      const double dxa = x - offset[static_cast<std::size_t>(a)];
      r2 += dxa * dxa;
    }
    sum += std::pow(std::sqrt(r2), alpha);
    for (int a = g.dim - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < per_axis) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return sum / static_cast<double>(points);
}

}  // namespace

PowerWeight power_weight(double alpha, const std::vector<double>& offset,
                         const GridLayout& layout) {
  const double n = static_cast<double>(layout.dim);
  if (!(alpha > -n)) fail(Errc::NonIntegrable, "power weight needs alpha > -n");
  if (static_cast<int>(offset.size()) != layout.dim)
    throw std::invalid_argument("power weight offset dimension mismatch");

  const double h = layout.side_at(layout.depth);
  GridFunction realized = [&]() {
    if (layout.dim == 1) {
      const double c = offset[0];
      return GridFunction::of(
          layout,
          [&](std::int64_t i) {
            const double x0 = layout.box.offset_at(0) + h * static_cast<double>(i);
            return (power_antiderivative(x0 + h - c, alpha) - power_antiderivative(x0 - c, alpha)) / h;
          },
          true);
    }
    return GridFunction::of(
        layout,
        [&](std::int64_t i) {
          const auto m = decode_coords(layout.dim, layout.depth, i);
          bool contains_offset = true;
          double r2 = 0.0;
          for (int a = 0; a < layout.dim; ++a) {
            const double lo =
                layout.box.offset_at(a) + h * static_cast<double>(m[static_cast<std::size_t>(a)]);
            const double ca = offset[static_cast<std::size_t>(a)];
            if (ca < lo || ca > lo + h) contains_offset = false;
            const double mid = lo + 0.5 * h - ca;
            r2 += mid * mid;
          }
          if (contains_offset) return quadrature_cell_average(layout, i, alpha, offset);
          return std::pow(std::sqrt(r2), alpha);
        },
        true);
  }();
  return PowerWeight{alpha, offset, std::move(realized)};
}

NormValue ap_constant(const GridFunction& w, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant needs p > 1");
  NormValue nv;
  nv.kind = "ap";
  if (!(w.min_value() > 0.0)) {
    nv.infinite = true;
    nv.note = "weight vanishes on a cell";
    return nv;
  }
  const auto& g = w.layout();
  const double pc = p / (p - 1.0);
  const LevelStack ws = accumulate(w);
  const LevelStack duals =
      accumulate_cells(g, [&](std::int64_t i) { return std::pow(w[i], -pc / p); });
  double best = -1.0;
  for (int k = 0; k <= g.depth; ++k) {
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      const double val = level_mean(ws, k, i) * std::pow(level_mean(duals, k, i), p / pc);
      if (val > best) {
        best = val;
        nv.witness = DyadicCube::from_flat(g.dim, k, i);
      }
    }
  }
  nv.value = best;
  return nv;
}

NormValue a1_constant(const GridFunction& w) {
  NormValue nv;
  nv.kind = "a1";
  if (!(w.min_value() > 0.0)) {
    nv.infinite = true;
    nv.note = "weight vanishes on a cell";
    return nv;
  }
  const auto mw = maximal(w);
  double best = -1.0;
  std::int64_t best_cell = 0;
  for (std::int64_t i = 0; i < w.size(); ++i) {
    const double ratio = mw.out[i] / w[i];
    if (ratio > best) {
      best = ratio;
      best_cell = i;
    }
  }
  nv.value = best;
  nv.witness = DyadicCube::from_flat(w.dim(), w.depth(), best_cell);
  return nv;
}

std::string AlphaInterval::str() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%c%g, %g%c", lo_closed ? '[' : '(', lo, hi,
                hi_closed ? ']' : ')');
  return buf;
}

AlphaInterval admissible_range(RangeKind kind, const ExponentConfig& cfg) {
  cfg.validate();
  const double n = static_cast<double>(cfg.n);
  switch (kind) {
    case RangeKind::ap:
      return AlphaInterval{-n, (cfg.p - 1.0) * n, false, false};
    case RangeKind::cond_1_2:
      return AlphaInterval{cfg.lambda - n, (cfg.p - 1.0) * n, true, false};
    case RangeKind::morrey_sharp:
      return AlphaInterval{cfg.lambda - n, cfg.lambda + (cfg.p - 1.0) * n, true, false};
  }
  throw std::invalid_argument("unknown range kind");
}

NormValue cond_1_2_value(const GridFunction& w, const ExponentConfig& cfg) {
  cfg.validate();
  NormValue nv;
  nv.kind = "cond12";
  if (!(w.min_value() > 0.0)) {
    nv.infinite = true;
    nv.note = "weight vanishes on a cell";
    return nv;
  }
  const auto& g = w.layout();
  const double p = cfg.p;
  const double pc = cfg.pconj();
  const double lambda = cfg.lambda;
  const double vol = g.cell_volume();
  const LevelStack ws = accumulate(w);
  const LevelStack duals =
      accumulate_cells(g, [&](std::int64_t i) { return std::pow(w[i], -pc / p); });

  // inner[k][i]: max over Q inside the cube of w(Q)/ell(Q)^lambda, with argmax.
  std::vector<std::vector<double>> inner(static_cast<std::size_t>(g.depth) + 1);
  std::vector<std::vector<std::pair<int, std::int64_t>>> inner_arg(
      static_cast<std::size_t>(g.depth) + 1);
  for (int k = g.depth; k >= 0; --k) {
    const double scale = vol / std::pow(g.side_at(k), lambda);
    auto& row = inner[static_cast<std::size_t>(k)];
    auto& arg = inner_arg[static_cast<std::size_t>(k)];
    row.resize(static_cast<std::size_t>(g.cubes_at(k)));
    arg.resize(static_cast<std::size_t>(g.cubes_at(k)));
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      double best = ws.sum_at(k, i) * scale;
      std::pair<int, std::int64_t> barg{k, i};
      if (k < g.depth) {
        const int corners = 1 << g.dim;
        for (int c = 0; c < corners; ++c) {
          const auto cf = static_cast<std::size_t>(child_flat(g.dim, k, i, c));
          const double cv = inner[static_cast<std::size_t>(k) + 1][cf];
          if (cv > best) {
            best = cv;
            barg = inner_arg[static_cast<std::size_t>(k) + 1][cf];
          }
        }
      }
      row[static_cast<std::size_t>(i)] = best;
      arg[static_cast<std::size_t>(i)] = barg;
    }
  }

  double best = -1.0;
  for (int k = 0; k <= g.depth; ++k) {
    const double outer = std::pow(g.side_at(k), lambda - static_cast<double>(g.dim));
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      const double term = inner[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * outer *
                          std::pow(level_mean(duals, k, i), p / pc);
      if (term > best) {
        best = term;
        nv.witness = DyadicCube::from_flat(g.dim, k, i);
        const auto ia = inner_arg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        nv.witness2 = DyadicCube::from_flat(g.dim, ia.first, ia.second);
      }
    }
  }
  nv.value = best;
  return nv;
}

}  // namespace morreylab
