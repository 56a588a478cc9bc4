#include "morreylab/twoweight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "morreylab/maximal.hpp"
#include "morreylab/parallel.hpp"
#include "morreylab/rng.hpp"
#include "morreylab/tree.hpp"
#include "morreylab/weights.hpp"

namespace morreylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CubeRef {
  int level;
  std::int64_t flat;
};

std::vector<CubeRef> all_cubes(const GridLayout& g) {
  std::vector<CubeRef> out;
  for (int k = 0; k <= g.depth; ++k)
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) out.push_back({k, i});
  return out;
}

// Per-cube values with a bottom-up running max (value and argmax cube).
struct MaxStack {
  std::vector<std::vector<double>> best;
  std::vector<std::vector<CubeRef>> arg;

  static MaxStack build(const GridLayout& g, const std::vector<std::vector<double>>& per_cube) {
    MaxStack s;
    s.best.resize(per_cube.size());
    s.arg.resize(per_cube.size());
    for (int k = g.depth; k >= 0; --k) {
      auto& row = s.best[static_cast<std::size_t>(k)];
      auto& arg = s.arg[static_cast<std::size_t>(k)];
      row.resize(static_cast<std::size_t>(g.cubes_at(k)));
      arg.resize(static_cast<std::size_t>(g.cubes_at(k)));
      for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
        double b = per_cube[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        CubeRef a{k, i};
        if (k < g.depth) {
          const int corners = 1 << g.dim;
          for (int c = 0; c < corners; ++c) {
            const auto cf = static_cast<std::size_t>(child_flat(g.dim, k, i, c));
            if (s.best[static_cast<std::size_t>(k) + 1][cf] > b) {
              b = s.best[static_cast<std::size_t>(k) + 1][cf];
              a = s.arg[static_cast<std::size_t>(k) + 1][cf];
            }
          }
        }
        row[static_cast<std::size_t>(i)] = b;
        arg[static_cast<std::size_t>(i)] = a;
      }
    }
    return s;
  }
};

// sigma = (b v)^{-e} cellwise. Cells where the product vanishes (or the power
// overflows) are degenerate: the conditional quantities are +inf on every cube
// containing one, which the scans track through a parallel count stack.
struct SigmaGrid {
  GridFunction sigma;   // degenerate cells stored as 0
  LevelStack degenerate;
  bool any_degenerate = false;
};

SigmaGrid make_sigma(const GridFunction& b, const GridFunction& v, double e) {
  const auto& g = v.layout();
  std::vector<double> sv(static_cast<std::size_t>(g.cells()), 0.0);
  std::vector<double> dv(static_cast<std::size_t>(g.cells()), 0.0);
  for (std::int64_t i = 0; i < g.cells(); ++i) {
    const double prod = b[i] * v[i];
    const double r = prod == 0.0 ? std::numeric_limits<double>::infinity() : std::pow(prod, -e);
    if (std::isfinite(r)) sv[static_cast<std::size_t>(i)] = r;
    else dv[static_cast<std::size_t>(i)] = 1.0;
  }
  SigmaGrid sg{GridFunction(g, std::move(sv), true), {}, false};
  sg.degenerate = accumulate_cells(g, [&](std::int64_t i) { return dv[static_cast<std::size_t>(i)]; });
  sg.any_degenerate = sg.degenerate.sum_at(0, 0) > 0.0;
  return sg;
}

SigmaGrid make_sigma(const GridFunction& v, double e) {
  return make_sigma(GridFunction::constant(v.layout(), 1.0), v, e);
}

// int_Q M[sigma 1_Q]^q u dx computed in one descent carrying the running max
// of sigma-averages over the admissible ancestors inside Q.
double localized_power_integral(const GridLayout& g, const LevelStack& sigma_sums,
                                const GridFunction& u, const CubeRef& q, double qexp) {
  double total = 0.0;
  struct Rec {
    const GridLayout& g;
    const LevelStack& sums;
    const GridFunction& u;
    double qexp;
    double* total;
    void operator()(int level, std::int64_t flat, double runmax) const {
      const double avg = level_mean(sums, level, flat);
      if (avg > runmax) runmax = avg;
      if (level == g.depth) {
        *total += std::pow(runmax, qexp) * u[flat];
        return;
      }
      const int corners = 1 << g.dim;
      for (int c = 0; c < corners; ++c) (*this)(level + 1, child_flat(g.dim, level, flat, c), runmax);
    }
  };
  Rec rec{g, sigma_sums, u, qexp, &total};
  rec(q.level, q.flat, 0.0);
  return total * g.cell_volume();
}

// Normalizers of the cube-adapted b1 candidates, one per dyadic cube.
std::vector<std::vector<double>> all_b1_normalizers(const GridLayout& g, double lambda) {
  const double lambda0 = (lambda + static_cast<double>(g.dim)) / 2.0;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(g.depth) + 1);
  for (int k = 0; k <= g.depth; ++k)
    c[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(g.cubes_at(k)));
  const auto cubes = all_cubes(g);
  parallel_for(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t j) {
    const auto& cu = cubes[static_cast<std::size_t>(j)];
    c[static_cast<std::size_t>(cu.level)][static_cast<std::size_t>(cu.flat)] =
        b1_normalizer(DyadicCube::from_flat(g.dim, cu.level, cu.flat), g, lambda, lambda0);
  });
  return c;
}

std::vector<std::vector<double>> zero_table(const GridLayout& g) {
  std::vector<std::vector<double>> t(static_cast<std::size_t>(g.depth) + 1);
  for (int k = 0; k <= g.depth; ++k)
    t[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(g.cubes_at(k)), 0.0);
  return t;
}

}  // namespace

const char* ConditionReport::kind_name(Kind k) {
  switch (k) {
    case Kind::a_est: return "a_est";
    case Kind::b: return "b";
    case Kind::c: return "c";
    case Kind::d: return "d";
    case Kind::e: return "e";
    case Kind::sawyer: return "sawyer";
    case Kind::prop51: return "prop51";
  }
  return "?";
}

ConditionReport test_condition_b(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts) {
  cfg.validate();
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double p = cfg.p, q = cfg.q, lambda = cfg.lambda, pc = cfg.pconj();
  const double vol = g.cell_volume();

  ConditionReport rep;
  rep.condition = ConditionReport::Kind::b;
  rep.config = cfg;

  const LevelStack us = accumulate(u);
  // best_u[k][i] = max over Q'' inside the cube of u(Q'')/ell(Q'')^lambda
  auto per_cube = zero_table(g);
  for (int k = 0; k <= g.depth; ++k) {
    const double scale = vol / std::pow(g.side_at(k), lambda);
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i)
      per_cube[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = us.sum_at(k, i) * scale;
  }
  const MaxStack best_u = MaxStack::build(g, per_cube);

  std::vector<LevelStack> cand_sums;
  std::vector<LevelStack> cand_deg;
  cand_sums.reserve(candidates.size());
  for (const auto& cand : candidates) {
    auto sg = make_sigma(cand.b, v, pc / p);
    cand_sums.push_back(accumulate(sg.sigma));
    cand_deg.push_back(std::move(sg.degenerate));
  }
  const auto vdual_sg = make_sigma(v, pc / p);
  const LevelStack vdual = accumulate(vdual_sg.sigma);
  std::vector<std::vector<double>> normalizers;
  if (opts.adaptive_b1) normalizers = all_b1_normalizers(g, lambda);

  double best = -1.0;
  CubeRef best_q{0, 0};
  std::string best_tag;
  for (int k = 0; k <= g.depth; ++k) {
    const double side = g.side_at(k);
    const double inv_vol = 1.0 / std::pow(side, static_cast<double>(g.dim));
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      double ub = kInf;
      std::string tag;
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        if (cand_deg[ci].sum_at(k, i) > 0.0) continue;
        const double val = std::pow(cand_sums[ci].sum_at(k, i) * vol, 1.0 / pc);
        if (val < ub) {
          ub = val;
          tag = candidates[ci].tag;
        }
      }
      if (opts.adaptive_b1 && !(vdual_sg.degenerate.sum_at(k, i) > 0.0)) {
        const double cq = normalizers[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        const double val = std::pow(cq * std::pow(side, lambda), 1.0 / p) *
                           std::pow(vdual.sum_at(k, i) * vol, 1.0 / pc);
        if (val < ub) {
          ub = val;
          char t[64];
          std::snprintf(t, sizeof t, "b1-adaptive(%d:%lld)", k, static_cast<long long>(i));
          tag = t;
        }
      }
      const double unorm =
          std::pow(best_u.best[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)], 1.0 / q);
      if (!std::isfinite(ub)) {
        if (unorm > 0.0 && !rep.infinite) {
          rep.infinite = true;
          rep.notes.push_back("unbounded dual factor at " +
                              DyadicCube::from_flat(g.dim, k, i).str());
        }
        continue;
      }
      const double val = inv_vol * unorm * ub;
      if (val > best) {
        best = val;
        best_q = {k, i};
        best_tag = tag;
        rep.witness_inner = DyadicCube::from_flat(
            g.dim, best_u.arg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].level,
            best_u.arg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)].flat);
      }
    }
  }
  rep.value = best < 0.0 ? 0.0 : best;
  rep.witness_outer = DyadicCube::from_flat(g.dim, best_q.level, best_q.flat);
  rep.candidate_b = best_tag;

  // Companion pairing lower bound, evaluated at the witness cube and the root;
  // each evaluation certifies a lower bound for the supremum over Q.
  const GridFunction vneg = v.power_capped(-1.0 / p);
  double lower = 0.0;
  for (const CubeRef& c : {best_q, CubeRef{0, 0}}) {
    const auto cube = DyadicCube::from_flat(g.dim, c.level, c.flat);
    ExponentConfig pair_cfg = cfg;
    const double lb = dual_pairing_lower_bound(masked(vneg, cube), pair_cfg, opts.pairing_trials,
                                               opts.seed);
    const double val =
        std::pow(best_u.best[static_cast<std::size_t>(c.level)][static_cast<std::size_t>(c.flat)], 1.0 / q) *
        lb / cube.volume(g.box);
    lower = std::max(lower, val);
  }
  rep.companion = lower;
  rep.companion_kind = "pairing_lower_bound";
  return rep;
}

namespace {

// Shared scaffolding for conditions (c) and (d): per-candidate inner sup
// tables, a per-Q0 candidate minimum including the cube-adapted b1, and the
// outer maximum over Q0.
struct InnerTables {
  std::vector<MaxStack> per_candidate;
  MaxStack adaptive;          // inner sup built from the pure-v quantity
  bool has_adaptive = false;
};

ConditionReport scan_min_max(const GridLayout& g, const ExponentConfig& cfg,
                             std::span<const BasisCandidate> candidates, const InnerTables& tabs,
                             const std::vector<std::vector<double>>& normalizers,
                             double adaptive_exponent, ConditionReport::Kind kind,
                             std::vector<std::string> notes) {
  ConditionReport rep;
  rep.condition = kind;
  rep.config = cfg;
  rep.notes = std::move(notes);
  const double lambda = cfg.lambda, q = cfg.q, p = cfg.p;

  double best = -1.0;
  CubeRef best_q0{0, 0};
  CubeRef best_inner{0, 0};
  std::string best_tag;
  for (int k = 0; k <= g.depth; ++k) {
    const double prefactor = std::pow(g.side_at(k), -lambda / q);
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      double mn = kInf;
      CubeRef mn_arg{k, i};
      std::string mn_tag;
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const double val =
            tabs.per_candidate[ci].best[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (val < mn) {
          mn = val;
          mn_arg = tabs.per_candidate[ci].arg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
          mn_tag = candidates[ci].tag;
        }
      }
      if (tabs.has_adaptive) {
        const double cq = normalizers[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        const double scale = std::pow(cq * std::pow(g.side_at(k), lambda), adaptive_exponent / p);
        const double val =
            scale * tabs.adaptive.best[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (val < mn) {
          mn = val;
          mn_arg = tabs.adaptive.arg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
          char t[64];
          std::snprintf(t, sizeof t, "b1-adaptive(%d:%lld)", k, static_cast<long long>(i));
          mn_tag = t;
        }
      }
      if (!std::isfinite(mn)) {
        if (!rep.infinite) {
          rep.infinite = true;
          rep.notes.push_back("unbounded inner quantity at " +
                              DyadicCube::from_flat(g.dim, k, i).str());
        }
        continue;
      }
      const double val = prefactor * mn;
      if (val > best) {
        best = val;
        best_q0 = {k, i};
        best_inner = mn_arg;
        best_tag = mn_tag;
      }
    }
  }
  rep.value = best < 0.0 ? 0.0 : best;
  rep.witness_outer = DyadicCube::from_flat(g.dim, best_q0.level, best_q0.flat);
  rep.witness_inner = DyadicCube::from_flat(g.dim, best_inner.level, best_inner.flat);
  rep.candidate_b = best_tag;
  return rep;
}

// Per-cube Sawyer quantity sigma(Q)^{-1/p} (int_Q M[sigma 1_Q]^q u)^{1/q} for
// one sigma grid; zero-mass cubes are skipped and noted, cubes containing a
// degenerate cell are +inf.
std::vector<std::vector<double>> sawyer_table(const GridLayout& g, const GridFunction& u,
                                              const SigmaGrid& sg, double p, double q,
                                              bool* saw_zero) {
  const LevelStack ss = accumulate(sg.sigma);
  auto t = zero_table(g);
  const auto cubes = all_cubes(g);
  std::vector<double> vals(cubes.size());
  parallel_for(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t j) {
    const auto& cu = cubes[static_cast<std::size_t>(j)];
    if (sg.degenerate.sum_at(cu.level, cu.flat) > 0.0) {
      vals[static_cast<std::size_t>(j)] = kInf;
      return;
    }
    const double mass = ss.sum_at(cu.level, cu.flat) * g.cell_volume();
    if (!(mass > 0.0)) {
      vals[static_cast<std::size_t>(j)] = -kInf;
      return;
    }
    const double integ = localized_power_integral(g, ss, u, cu, q);
    vals[static_cast<std::size_t>(j)] = std::pow(integ, 1.0 / q) * std::pow(mass, -1.0 / p);
  });
  bool zero = false;
  for (std::size_t j = 0; j < cubes.size(); ++j) {
    if (vals[j] == -kInf) {
      zero = true;
      vals[j] = 0.0;  // cannot contribute to any supremum
    }
    t[static_cast<std::size_t>(cubes[j].level)][static_cast<std::size_t>(cubes[j].flat)] = vals[j];
  }
  if (saw_zero) *saw_zero = zero;
  return t;
}

}  // namespace

ConditionReport test_condition_c(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts) {
  cfg.validate();
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double p = cfg.p, q = cfg.q, pc = cfg.pconj();

  std::vector<std::string> notes;
  InnerTables tabs;
  for (const auto& cand : candidates) {
    bool saw_zero = false;
    tabs.per_candidate.push_back(
        MaxStack::build(g, sawyer_table(g, u, make_sigma(cand.b, v, pc / p), p, q, &saw_zero)));
    if (saw_zero) notes.push_back("ZeroSigma: skipped zero-mass cubes for " + cand.tag);
  }
  std::vector<std::vector<double>> normalizers;
  if (opts.adaptive_b1) {
    bool saw_zero = false;
    tabs.adaptive = MaxStack::build(g, sawyer_table(g, u, make_sigma(v, pc / p), p, q, &saw_zero));
    tabs.has_adaptive = true;
    normalizers = all_b1_normalizers(g, cfg.lambda);
    if (saw_zero) notes.push_back("ZeroSigma: skipped zero-mass cubes for adaptive b1");
  }
  // The adapted candidate is constant ell(Q0)^{-lambda}/c on Q0, so its inner
  // quantity is the pure-v table scaled by (c ell^lambda)^{1/p'}.
  return scan_min_max(g, cfg, candidates, tabs, normalizers, p / pc,
                      ConditionReport::Kind::c, std::move(notes));
}

ConditionReport test_condition_d(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg, double a,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts) {
  cfg.validate();
  if (!(a > 1.0)) fail(Errc::InvalidExponents, "condition (d) needs a > 1");
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double p = cfg.p, q = cfg.q, pc = cfg.pconj();
  const double vol = g.cell_volume();
  const LevelStack us = accumulate(u);

  auto table_for = [&](const SigmaGrid& sg) {
    const LevelStack sums = accumulate(sg.sigma);
    auto t = zero_table(g);
    for (int k = 0; k <= g.depth; ++k) {
      const double volQ = std::pow(g.side_at(k), static_cast<double>(g.dim));
      for (std::int64_t i = 0; i < g.cubes_at(k); ++i)
        t[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
            sg.degenerate.sum_at(k, i) > 0.0
                ? kInf
                : std::pow(us.sum_at(k, i) * vol, 1.0 / q) * std::pow(volQ, -1.0 / p) *
                      std::pow(level_mean(sums, k, i), 1.0 / (a * pc));
    }
    return t;
  };

  InnerTables tabs;
  for (const auto& cand : candidates)
    tabs.per_candidate.push_back(MaxStack::build(g, table_for(make_sigma(cand.b, v, a * pc / p))));
  std::vector<std::vector<double>> normalizers;
  if (opts.adaptive_b1) {
    tabs.adaptive = MaxStack::build(g, table_for(make_sigma(v, a * pc / p)));
    tabs.has_adaptive = true;
    normalizers = all_b1_normalizers(g, cfg.lambda);
  }
  // (avg (b v)^{-ap'/p})^{1/ap'} with b constant on Q0 contributes b^{-1/p}.
  auto rep = scan_min_max(g, cfg, candidates, tabs, normalizers, 1.0,
                          ConditionReport::Kind::d, {});
  rep.config.a = a;
  return rep;
}

ConditionReport test_condition_e(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts) {
  cfg.validate();
  if (!cfg.has_r()) fail(Errc::ExponentMismatch, "condition (e) needs q < p");
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double p = cfg.p, q = cfg.q, pc = cfg.pconj(), r = cfg.r(), lambda = cfg.lambda;
  const double vol = g.cell_volume();

  ConditionReport rep;
  rep.condition = ConditionReport::Kind::e;
  rep.config = cfg;

  auto value_table = [&](const SigmaGrid& sg, const GridFunction& bv) {
    auto t = zero_table(g);
    if (sg.any_degenerate) {
      // an infinite-sigma cell drives the global maximal function everywhere
      for (auto& row : t) std::fill(row.begin(), row.end(), kInf);
      return t;
    }
    const GridFunction m = maximal(sg.sigma).out;
    const LevelStack sums = accumulate_cells(g, [&](std::int64_t i) {
      return std::pow(m[i], r) * std::pow(u[i], r / q) * std::pow(bv[i], r * pc / (p * p));
    });
    for (int k = 0; k <= g.depth; ++k) {
      const double prefactor = std::pow(g.side_at(k), -lambda / q);
      for (std::int64_t i = 0; i < g.cubes_at(k); ++i)
        t[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
            prefactor * std::pow(sums.sum_at(k, i) * vol, 1.0 / r);
    }
    return t;
  };

  std::vector<std::vector<std::vector<double>>> tables;
  for (const auto& cand : candidates) {
    const GridFunction bv = combine(cand.b, v, [](double x, double y) { return x * y; }, true);
    tables.push_back(value_table(make_sigma(cand.b, v, pc / p), bv));
  }

  // Cube-adapted candidates need the genuine b1 grid: outside Q0 the candidate
  // decays, which feeds the global maximal function in the integrand.
  std::vector<std::vector<double>> adaptive_vals;
  if (opts.adaptive_b1) {
    adaptive_vals.resize(static_cast<std::size_t>(g.depth) + 1);
    const double lambda0 = (lambda + static_cast<double>(g.dim)) / 2.0;
    for (int k = 0; k <= g.depth; ++k)
      adaptive_vals[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(g.cubes_at(k)));
    const auto cubes = all_cubes(g);
    parallel_for(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t j) {
      const auto& cu = cubes[static_cast<std::size_t>(j)];
      const auto q0 = DyadicCube::from_flat(g.dim, cu.level, cu.flat);
      const auto m1 = maximal(indicator(g, q0));
      const double e = lambda0 / static_cast<double>(g.dim);
      const double scale = std::pow(q0.side(g.box), lambda);
      GridFunction raw =
          m1.out.cellwise([e, scale](double x) { return std::pow(x, e) / scale; }, true);
      const double c = choquet_integral(raw, lambda);
      GridFunction b = raw.cellwise([c](double x) { return x / c; }, true);
      const GridFunction bv = combine(b, v, [](double x, double y) { return x * y; }, true);
      adaptive_vals[static_cast<std::size_t>(cu.level)][static_cast<std::size_t>(cu.flat)] =
          value_table(make_sigma(b, v, pc / p), bv)[static_cast<std::size_t>(cu.level)]
                     [static_cast<std::size_t>(cu.flat)];
    });
  }

  double best = -1.0;
  CubeRef best_q0{0, 0};
  std::string best_tag;
  for (int k = 0; k <= g.depth; ++k) {
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      double mn = kInf;
      std::string tag;
      for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const double val = tables[ci][static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (val < mn) {
          mn = val;
          tag = candidates[ci].tag;
        }
      }
      if (opts.adaptive_b1) {
        const double val = adaptive_vals[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (val < mn) {
          mn = val;
          char t[64];
          std::snprintf(t, sizeof t, "b1-adaptive(%d:%lld)", k, static_cast<long long>(i));
          tag = t;
        }
      }
      if (!std::isfinite(mn)) {
        if (!rep.infinite) {
          rep.infinite = true;
          rep.notes.push_back("unbounded integrand at " +
                              DyadicCube::from_flat(g.dim, k, i).str());
        }
        continue;
      }
      if (mn > best) {
        best = mn;
        best_q0 = {k, i};
        best_tag = tag;
      }
    }
  }
  rep.value = best < 0.0 ? 0.0 : best;
  rep.witness_outer = DyadicCube::from_flat(g.dim, best_q0.level, best_q0.flat);
  rep.candidate_b = best_tag;
  return rep;
}

ConditionReport test_sawyer(const GridFunction& u, const GridFunction& v, double p, double q) {
  if (!(p > 1.0) || !(p <= q)) fail(Errc::InvalidExponents, "Sawyer test needs 1 < p <= q");
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double pc = p / (p - 1.0);

  ConditionReport rep;
  rep.condition = ConditionReport::Kind::sawyer;
  rep.config = ExponentConfig{g.dim, p, q, 0.5 * g.dim, std::nullopt};

  bool saw_zero = false;
  const auto table = sawyer_table(g, u, make_sigma(v, pc / p), p, q, &saw_zero);
  if (saw_zero) rep.notes.push_back("ZeroSigma: skipped zero-mass cubes");

  double best = -1.0;
  CubeRef best_q{0, 0};
  for (int k = 0; k <= g.depth; ++k)
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      const double val = table[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      if (!std::isfinite(val)) {
        if (!rep.infinite) {
          rep.infinite = true;
          rep.notes.push_back("unbounded ratio at " + DyadicCube::from_flat(g.dim, k, i).str());
        }
        continue;
      }
      if (val > best) {
        best = val;
        best_q = {k, i};
      }
    }
  rep.value = best < 0.0 ? 0.0 : best;
  rep.witness_outer = DyadicCube::from_flat(g.dim, best_q.level, best_q.flat);
  return rep;
}

int PrincipalForest::stopping_parent(const DyadicCube& q) const {
  if (!q0.contains(q)) throw std::invalid_argument("cube lies outside the forest root");
  for (int lvl = q.level(); lvl >= q0.level(); --lvl) {
    const auto anc = q.ancestor(lvl);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].cube == anc) return static_cast<int>(i);
  }
  throw std::logic_error("forest has no root?");
}

bool PrincipalForest::eq35_holds(double rel_tol) const {
  for (const auto& node : nodes)
    if (node.sigma_carrier < 0.5 * node.sigma_total * (1.0 - rel_tol)) return false;
  return true;
}

PrincipalForest build_principal_forest(const GridFunction& f, const GridFunction& sigma,
                                       const DyadicCube& q0, StoppingRhs rhs) {
  const auto& g = f.layout();
  if (!sigma.layout().compatible(g)) throw std::invalid_argument("f and sigma layouts differ");
  if (f.min_value() < 0.0 || sigma.min_value() < 0.0)
    throw std::invalid_argument("principal cubes need f, sigma >= 0");
  const LevelStack fs = accumulate(f);
  const LevelStack ss = accumulate(sigma);
  const double vol = g.cell_volume();
  if (!(ss.cube_sum(q0) > 0.0)) fail(Errc::ZeroMeasure, "sigma(Q0) = 0");

  PrincipalForest forest;
  forest.q0 = q0;
  forest.nodes.push_back({q0, -1, 0, {}, {}, ss.cube_sum(q0) * vol, 0.0});

  // Stopping rule against the parent principal cube F:
  //   average:  f(Q)/sigma(Q) > 2 f(F)/sigma(F)
  //   integral: f(Q)/sigma(Q) > 2 f(F)          (literal unnormalized form)
  auto stops = [&](double fq, double sq, double ff, double sf) {
    if (!(sq > 0.0)) return false;
    if (rhs == StoppingRhs::average) return fq * sf > 2.0 * ff * sq;
    return fq > 2.0 * (ff * vol) * sq;
  };

  std::size_t head = 0;
  while (head < forest.nodes.size()) {
    const std::size_t me = head++;
    const DyadicCube cube = forest.nodes[me].cube;
    const double ff = fs.cube_sum(cube);
    const double sf = ss.cube_sum(cube);
    std::vector<DyadicCube> found;

    struct Rec {
      const GridLayout& g;
      const LevelStack& fs;
      const LevelStack& ss;
      double ff, sf;
      const std::function<bool(double, double, double, double)>& stops;
      std::vector<DyadicCube>* found;
      void operator()(int level, std::int64_t flat) const {
        const double sq = ss.sum_at(level, flat);
        if (!(sq > 0.0)) return;
        if (stops(fs.sum_at(level, flat), sq, ff, sf)) {
          found->push_back(DyadicCube::from_flat(g.dim, level, flat));
          return;
        }
        if (level == g.depth) return;
        const int corners = 1 << g.dim;
        for (int c = 0; c < corners; ++c) (*this)(level + 1, child_flat(g.dim, level, flat, c));
      }
    };
    const std::function<bool(double, double, double, double)> stops_fn = stops;
    Rec rec{g, fs, ss, ff, sf, stops_fn, &found};
    if (cube.level() < g.depth) {
      const int corners = 1 << g.dim;
      for (int c = 0; c < corners; ++c)
        rec(cube.level() + 1, child_flat(g.dim, cube.level(), cube.flat(), c));
    }

    std::vector<std::uint8_t> child_mask(static_cast<std::size_t>(g.cells()), 0);
    for (const auto& ch : found) {
      forest.nodes.push_back({ch, static_cast<int>(me), forest.nodes[me].generation + 1, {}, {},
                              ss.cube_sum(ch) * vol, 0.0});
      forest.nodes[me].children.push_back(static_cast<int>(forest.nodes.size()) - 1);
      for_each_cell(g, ch, [&](std::int64_t i) { child_mask[static_cast<std::size_t>(i)] = 1; });
    }
    double carrier_sigma = 0.0;
    for_each_cell(g, cube, [&](std::int64_t i) {
      if (!child_mask[static_cast<std::size_t>(i)]) {
        forest.nodes[me].carrier_cells.push_back(i);
        carrier_sigma += sigma[i];
      }
    });
    forest.nodes[me].sigma_carrier = carrier_sigma * vol;
  }
  return forest;
}

namespace {

struct Member {
  std::string name;
  GridFunction f;
};

std::vector<Member> build_family(const GridFunction& v, const ExponentConfig& cfg,
                                 const TestFamilySpec& spec, std::uint64_t seed) {
  const auto& g = v.layout();
  std::vector<Member> fam;
  if (spec.cube_indicators) {
    for (int k = 0; k <= g.depth; ++k)
      for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
        const auto cube = DyadicCube::from_flat(g.dim, k, i);
        fam.push_back({"indicator " + cube.str(), indicator(g, cube)});
      }
  }
  if (spec.power_profiles) {
    const std::vector<double> origin(static_cast<std::size_t>(g.dim), 0.0);
    for (double beta : {-0.8, -0.5, -0.25, 0.25, 0.5, 1.0}) {
      const double b = beta * static_cast<double>(g.dim);
      char name[48];
      std::snprintf(name, sizeof name, "profile|x|^%g", b);
      fam.push_back({name, power_weight(b, origin, g).realized});
    }
  }
  if (spec.sigma_profiles) {
    const double p = cfg.p, pc = cfg.pconj();
    fam.push_back({"sigma v^(-1/p)", v.power_capped(-1.0 / p)});
    const GridFunction sig = v.power_capped(-pc / p);
    fam.push_back({"sigma v^(-p'/p)", sig});
    const int top = std::min(spec.localized_levels, g.depth);
    for (int k = 0; k <= top; ++k)
      for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
        const auto cube = DyadicCube::from_flat(g.dim, k, i);
        fam.push_back({"sigma-local " + cube.str(), masked(sig, cube)});
      }
  }
  if (spec.random_sparse > 0) {
    Rng rng(seed);
    for (int t = 0; t < spec.random_sparse; ++t) {
      std::vector<double> vals(static_cast<std::size_t>(g.cells()), 0.0);
      const std::int64_t support = 1 + static_cast<std::int64_t>(rng.below(
                                           static_cast<std::uint64_t>(std::min<std::int64_t>(8, g.cells()))));
      for (std::int64_t s = 0; s < support; ++s)
        vals[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(g.cells())))] =
            rng.lattice() + 0x1.0p-20;
      fam.push_back({"random#" + std::to_string(t), GridFunction(g, std::move(vals), true)});
    }
  }
  if (spec.level_set_adapted) {
    const GridFunction sig = v.power_capped(-cfg.pconj() / cfg.p);
    const int top = std::min(2, g.depth);
    for (int k = 0; k <= top; ++k)
      for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
        const auto cube = DyadicCube::from_flat(g.dim, k, i);
        const auto dec = level_sets_of_maximal(masked(sig, cube), cube);
        std::vector<double> vals(static_cast<std::size_t>(g.cells()), 0.0);
        for (const auto& [qc, cells] : dec.sets) {
          const double avg = cube_average(sig, qc);
          for (auto cell : cells) vals[static_cast<std::size_t>(cell)] = avg;
        }
        fam.push_back({"adapted " + cube.str(), GridFunction(g, std::move(vals), true)});
      }
  }
  return fam;
}

}  // namespace

EstimateReport estimate_inequality(const GridFunction& u, const GridFunction& v,
                                   const ExponentConfig& cfg, const TestFamilySpec& family,
                                   std::uint64_t seed) {
  cfg.validate();
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double p = cfg.p, q = cfg.q, lambda = cfg.lambda;
  const double vol = g.cell_volume();

  const auto fam = build_family(v, cfg, family, seed);
  std::vector<DyadicCube> local_cubes{DyadicCube::root(g.dim)};
  if (g.depth > 0)
    for (const auto& ch : DyadicCube::root(g.dim).children()) local_cubes.push_back(ch);

  struct Result {
    double global = -1.0;
    double localized = -1.0;
    bool skipped = false;
  };
  std::vector<Result> results(fam.size());

  parallel_for(static_cast<std::int64_t>(fam.size()), [&](std::int64_t j) {
    const auto& member = fam[static_cast<std::size_t>(j)];
    const double den = morrey_norm(member.f, p, lambda, &v).value;
    if (!(den > 0.0)) {
      results[static_cast<std::size_t>(j)].skipped = true;
      return;
    }
    const auto mf = maximal(member.f);
    results[static_cast<std::size_t>(j)].global =
        morrey_norm(mf.out, q, lambda, &u).value / den;

    const LevelStack fsums = accumulate_abs(member.f);
    double loc_best = 0.0;
    for (const auto& q0 : local_cubes) {
      double cinf = 0.0;
      for (int lvl = q0.level() - 1; lvl >= 0; --lvl)
        cinf = std::max(cinf, level_mean(fsums, lvl, q0.ancestor(lvl).flat()));
      const auto mloc = maximal(member.f, q0);
      double integ = 0.0;
      for_each_cell(g, q0, [&](std::int64_t i) {
        integ += std::pow(cinf + mloc.out[i], q) * u[i];
      });
      const double val =
          std::pow(integ * vol / std::pow(q0.side(g.box), lambda), 1.0 / q);
      loc_best = std::max(loc_best, val);
    }
    results[static_cast<std::size_t>(j)].localized = loc_best / den;
  });

  EstimateReport rep;
  for (std::size_t j = 0; j < fam.size(); ++j) {
    if (results[j].skipped) {
      if (rep.skipped.size() < 16)
        rep.skipped.push_back("DegenerateDenominator: " + fam[j].name);
      continue;
    }
    ++rep.evaluated;
    if (results[j].global > rep.global_value) {
      rep.global_value = results[j].global;
      rep.witness = fam[j].name;
    }
    rep.localized_value = std::max(rep.localized_value, results[j].localized);
  }
  if (rep.global_value < 0.0) rep.global_value = 0.0;
  if (rep.localized_value < 0.0) rep.localized_value = 0.0;
  return rep;
}

ConditionReport prop51_check(const GridFunction& u, const GridFunction& v,
                             const ExponentConfig& cfg, const TestFamilySpec& family,
                             std::uint64_t seed) {
  cfg.validate();
  if (!cfg.has_r()) fail(Errc::ExponentMismatch, "upper-triangle criterion needs q < p");
  const auto& g = u.layout();
  if (!v.layout().compatible(g)) throw std::invalid_argument("u and v live on different grids");
  const double p = cfg.p, q = cfg.q, pc = cfg.pconj(), r = cfg.r();

  const auto a1 = a1_constant(v);
  if (a1.infinite) throw std::invalid_argument("upper-triangle criterion requires v in A_1");

  ConditionReport rep;
  rep.condition = ConditionReport::Kind::prop51;
  rep.config = cfg;
  rep.witness_outer = DyadicCube::root(g.dim);

  const GridFunction h = combine(
      u, v, [&](double ui, double vi) { return std::pow(ui, 1.0 / q) * std::pow(vi, 1.0 / pc); },
      true);
  rep.value = lebesgue_norm(h, r).value;

  const GridFunction v1p = v.power_capped(1.0 - p);
  double best = 0.0;
  const auto fam = build_family(v, cfg, family, seed);
  for (const auto& member : fam) {
    const double den = lebesgue_norm(member.f, p, &v1p).value;
    if (!(den > 0.0)) {
      if (rep.notes.size() < 16)
        rep.notes.push_back("DegenerateDenominator: " + member.name);
      continue;
    }
    const double num = lebesgue_norm(maximal(member.f).out, q, &u).value;
    best = std::max(best, num / den);
  }
  rep.companion = best;
  rep.companion_kind = "empirical_ratio";
  rep.notes.push_back("A1 constant of v: " + std::to_string(a1.value));
  return rep;
}

}  // namespace morreylab
