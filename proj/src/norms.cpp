#include "morreylab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "morreylab/rng.hpp"
#include "morreylab/tree.hpp"
#include "morreylab/weights.hpp"

namespace morreylab {

double NormValue::as_double() const {
  return infinite ? std::numeric_limits<double>::infinity() : value;
}

NormValue lebesgue_norm(const GridFunction& f, double p, const GridFunction* w) {
  if (!(p > 0.0)) throw std::invalid_argument("lebesgue_norm needs p > 0");
  if (w && !w->layout().compatible(f.layout()))
    throw std::invalid_argument("incompatible weight layout");
  double s = 0.0;
  for (std::int64_t i = 0; i < f.size(); ++i)
    s += std::pow(std::abs(f[i]), p) * (w ? (*w)[i] : 1.0);
  NormValue nv;
  nv.kind = "lebesgue";
  nv.value = std::pow(s * f.layout().cell_volume(), 1.0 / p);
  return nv;
}

NormValue morrey_norm(const GridFunction& f, double p, double lambda, const GridFunction* w) {
  if (!(p > 0.0)) throw std::invalid_argument("morrey_norm needs p > 0");
  const auto& g = f.layout();
  if (w && !w->layout().compatible(g)) throw std::invalid_argument("incompatible weight layout");
  const LevelStack sums = accumulate_cells(g, [&](std::int64_t i) {
    return std::pow(std::abs(f[i]), p) * (w ? (*w)[i] : 1.0);
  });
  NormValue nv;
  nv.kind = "morrey";
  double best = -1.0;
  int best_level = 0;
  std::int64_t best_flat = 0;
  for (int k = 0; k <= g.depth; ++k) {
    const double weight_k = std::pow(g.side_at(k), -lambda) * g.cell_volume();
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      const double val = sums.sum_at(k, i) * weight_k;
      if (val > best) {
        best = val;
        best_level = k;
        best_flat = i;
      }
    }
  }
  nv.value = std::pow(best, 1.0 / p);
  nv.witness = DyadicCube::from_flat(g.dim, best_level, best_flat);
  return nv;
}

NormValue morrey_norm(const GridFunction& f, const ExponentConfig& cfg, const GridFunction* w) {
  return morrey_norm(f, cfg.p, cfg.lambda, w);
}

double dual_pairing_lower_bound(const GridFunction& g, const ExponentConfig& cfg, int trials,
                                std::uint64_t seed) {
  if (g.min_value() < 0.0) throw std::invalid_argument("dual pairing needs g >= 0");
  cfg.validate();
  const auto& lay = g.layout();
  const double p = cfg.p;
  const double lambda = cfg.lambda;
  const double n = static_cast<double>(lay.dim);
  const double vol = lay.cell_volume();
  double best = 0.0;

  // Cube indicators normalized to unit Morrey norm: ||1_Q|| = ell(Q)^{(n-lambda)/p}.
  const LevelStack gs = accumulate(g);
  for (int k = 0; k <= lay.depth; ++k) {
    const double norm = std::pow(lay.side_at(k), (n - lambda) / p);
    for (std::int64_t i = 0; i < lay.cubes_at(k); ++i)
      best = std::max(best, gs.sum_at(k, i) * vol / norm);
  }

  auto try_function = [&](const GridFunction& f) {
    const double norm = morrey_norm(f, p, lambda).value;
    if (!(norm > 0.0)) return;
    double pairing = 0.0;
    for (std::int64_t i = 0; i < lay.cells(); ++i) pairing += f[i] * g[i];
    best = std::max(best, pairing * vol / norm);
  };

  // Power profiles |x|^beta relative to the box corner.
  const std::vector<double> origin(static_cast<std::size_t>(lay.dim), 0.0);
  for (double beta : {-0.8, -0.5, -0.25, 0.25, 0.5, 1.0}) {
    const double b = beta * n;
    if (!(b > -n)) continue;
    try_function(power_weight(b, origin, lay).realized);
  }

  // Random sparse nonnegative functions.
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(static_cast<std::size_t>(lay.cells()), 0.0);
    const std::int64_t support =
        1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::min<std::int64_t>(8, lay.cells()))));
    for (std::int64_t s = 0; s < support; ++s)
      v[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(lay.cells())))] =
          rng.lattice() + 0x1.0p-20;
    try_function(GridFunction(lay, std::move(v), true));
  }
  return best;
}

NormValue h_norm_upper_bound(const GridFunction& g, double p,
                             std::span<const BasisCandidate> candidates) {
  if (candidates.empty()) fail(Errc::EmptyCandidates, "h_norm_upper_bound needs candidates");
  if (!(p > 1.0)) throw std::invalid_argument("h_norm_upper_bound needs p > 1");
  const auto& lay = g.layout();
  NormValue nv;
  nv.kind = "h-upper";
  double best = std::numeric_limits<double>::infinity();
  std::string best_tag;
  for (const auto& cand : candidates) {
    if (!cand.b.layout().compatible(lay)) throw std::invalid_argument("candidate layout mismatch");
    double s = 0.0;
    bool inf = false;
    for (std::int64_t i = 0; i < g.size(); ++i) {
      const double gi = std::abs(g[i]);
      if (gi == 0.0) continue;
      const double bi = cand.b[i];
      if (bi == 0.0) {
        inf = true;
        break;
      }
      s += std::pow(gi, p) * std::pow(bi, 1.0 - p);
    }
    if (inf) continue;
    const double val = std::pow(s * lay.cell_volume(), 1.0 / p);
    if (val < best) {
      best = val;
      best_tag = cand.tag;
    }
  }
  if (!std::isfinite(best)) {
    nv.infinite = true;
    nv.note = "every candidate vanishes somewhere on supp g";
    return nv;
  }
  nv.value = best;
  nv.note = best_tag;
  return nv;
}

NormValue h_norm_upper_bound(const GridFunction& g, const ExponentConfig& cfg,
                             std::span<const BasisCandidate> candidates) {
  return h_norm_upper_bound(g, cfg.p, candidates);
}

GridFunction AtomicDecomposition::reconstruct(const GridLayout& layout) const {
  std::vector<double> v(static_cast<std::size_t>(layout.cells()), 0.0);
  for (const auto& atom : atoms)
    for (auto cell : atom.carrier)
      v[static_cast<std::size_t>(cell)] += atom.coeff * atom.atom[cell];
  return GridFunction(layout, std::move(v));
}

AtomicDecomposition atomic_decompose(const GridFunction& f, const ExponentConfig& cfg,
                                     const BasisCandidate& b) {
  cfg.validate();
  if (f.min_value() < 0.0) throw std::invalid_argument("atomic decomposition needs f >= 0");
  const auto& lay = f.layout();
  if (!b.b.layout().compatible(lay)) throw std::invalid_argument("basis layout mismatch");
  for (std::int64_t i = 0; i < f.size(); ++i)
    if (f[i] > 0.0 && !(b.b[i] > 0.0))
      fail(Errc::DegenerateBasis, "candidate vanishes on the support of f");

  const double p = cfg.p;
  const double pc = cfg.pconj();
  const double lambda = cfg.lambda;
  const double vol = lay.cell_volume();

  double minpos = std::numeric_limits<double>::infinity();
  double maxval = 0.0;
  for (std::int64_t i = 0; i < b.b.size(); ++i) {
    const double v = b.b[i];
    if (v > 0.0) minpos = std::min(minpos, v);
    maxval = std::max(maxval, v);
  }

  AtomicDecomposition dec;
  dec.basis_tag = b.tag;
  if (!(maxval > 0.0)) fail(Errc::DegenerateBasis, "candidate vanishes identically");

  const int k_lo = std::ilogb(minpos) - 1;
  int k_hi = std::ilogb(maxval);
  if (std::ldexp(1.0, k_hi) >= maxval) --k_hi;

  // Minimizing covers of the level sets E_k = {b > 2^k}; the DP tie rule makes
  // them nested, so the carriers tile the union of the coarsest cover.
  std::vector<CoverResult> covers;
  std::vector<CellSet> cover_sets;
  for (int k = k_lo; k <= k_hi; ++k) {
    const CellSet ek = CellSet::above(b.b, std::ldexp(1.0, k));
    CoverResult cov = hausdorff_content(ek, lambda);
    cover_sets.push_back(cov.cover_cells(lay));
    dec.thresholds_k.push_back(k);
    double cost = 0.0;
    for (const auto& q : cov.cover)
      cost += std::pow(q.side(lay.box), lambda);
    dec.cover_cost.push_back(cost);
    covers.push_back(std::move(cov));
  }
  for (std::size_t j = 1; j < cover_sets.size(); ++j)
    if (!cover_sets[j].subset_of(cover_sets[j - 1]))
      throw std::logic_error("level-set covers failed to nest");

  for (std::size_t j = 0; j < covers.size(); ++j) {
    const CellSet* next = j + 1 < cover_sets.size() ? &cover_sets[j + 1] : nullptr;
    for (const auto& q : covers[j].cover) {
      std::vector<std::int64_t> carrier;
      for_each_cell(lay, q, [&](std::int64_t i) {
        if (!next || !next->contains(i)) carrier.push_back(i);
      });
      if (carrier.empty()) continue;
      double integ = 0.0;
      for (auto i : carrier) integ += std::pow(f[i], p) * vol;
      if (!(integ > 0.0)) continue;
      const double ell_pow = std::pow(q.side(lay.box), lambda / pc);
      const double ipow = std::pow(integ, 1.0 / p);
      const double coeff = ell_pow * ipow;
      std::vector<double> av(static_cast<std::size_t>(lay.cells()), 0.0);
      for (auto i : carrier) av[static_cast<std::size_t>(i)] = f[i] / (ell_pow * ipow);
      dec.atoms.push_back(AtomicDecomposition::Atom{dec.thresholds_k[j], coeff, q,
                                                    GridFunction(lay, std::move(av), true),
                                                    std::move(carrier)});
      dec.coeff_l1 += coeff;
    }
  }

  double chain = 0.0;
  for (std::size_t j = 0; j < dec.cover_cost.size(); ++j)
    chain += std::ldexp(dec.cover_cost[j], dec.thresholds_k[j] + 1);
  double fpb = 0.0;
  for (std::int64_t i = 0; i < f.size(); ++i)
    if (f[i] > 0.0) fpb += std::pow(f[i], p) * std::pow(b.b[i], 1.0 - p);
  dec.holder_chain_bound = std::pow(chain, 1.0 / pc) * std::pow(fpb * vol, 1.0 / p);
  return dec;
}

}  // namespace morreylab
