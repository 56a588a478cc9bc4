#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "morreylab/norms.hpp"
#include "morreylab/rng.hpp"
#include "oracles.hpp"

using namespace morreylab;

namespace {

ExponentConfig cfg_1d(double p, double q, double lambda) {
  return ExponentConfig{1, p, q, lambda, std::nullopt};
}

std::vector<BasisCandidate> small_roster(const GridLayout& g, double lambda) {
  std::vector<BasisCandidate> roster;
  const double lambda0 = (lambda + g.dim) / 2.0;
  for (int k = 0; k <= std::min(2, g.depth); ++k)
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i)
      roster.push_back(make_b1(DyadicCube::from_flat(g.dim, k, i), g, lambda, lambda0));
  return roster;
}

}  // namespace

TEST_CASE("lebesgue norm examples") {
  GridLayout g{1, 2, {}};
  SUBCASE("unit constant on the unit box") {
    for (double p : {1.0, 2.0, 3.5})
      CHECK(lebesgue_norm(GridFunction::constant(g, 1.0), p).value == 1.0);
  }
  SUBCASE("cell sum") {
    const GridFunction f(g, {4, 0, 0, 0});
    CHECK(lebesgue_norm(f, 2.0).value == 2.0);
  }
  SUBCASE("homogeneity") {
    Rng rng(2);
    const auto f = oracle::random_lattice(g, rng);
    CHECK(lebesgue_norm(f.cellwise([](double v) { return 2 * v; }), 1.5).value ==
          doctest::Approx(2 * lebesgue_norm(f, 1.5).value).epsilon(1e-14));
  }
}

TEST_CASE("morrey norm examples and witness") {
  GridLayout g{1, 2, {}};
  SUBCASE("constant function attains at the root when lambda < n") {
    const auto nv = morrey_norm(GridFunction::constant(g, 1.0), 2.0, 0.5);
    CHECK(nv.value == 1.0);
    CHECK(*nv.witness == DyadicCube::root(1));
  }
  SUBCASE("quarter indicator at p=1, lambda=1/2 attains on its support cube") {
    const GridFunction f(g, {1, 0, 0, 0});
    const auto nv = morrey_norm(f, 1.0, 0.5);
    CHECK(nv.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*nv.witness == DyadicCube(1, 2, {0}));
  }
  SUBCASE("homogeneity") {
    Rng rng(4);
    const auto f = oracle::random_lattice(g, rng);
    CHECK(morrey_norm(f.cellwise([](double v) { return 2 * v; }), 2.0, 0.5).value ==
          2 * morrey_norm(f, 2.0, 0.5).value);
  }
}

TEST_CASE("morrey norm dominated by scaled lebesgue norm at the root") {
  Rng rng(6);
  GridLayout g{1, 4, {}};
  const auto f = oracle::random_lattice(g, rng);
  // the root cube is one admissible competitor
  CHECK(morrey_norm(f, 2.0, 0.5).value >= lebesgue_norm(f, 2.0).value);
}

TEST_CASE("dual pairing lower bound") {
  GridLayout g{1, 2, {}};
  SUBCASE("zero function pairs to zero") {
    CHECK(dual_pairing_lower_bound(GridFunction::zeros(g), cfg_1d(2, 2, 0.5), 8) == 0.0);
  }
  SUBCASE("brute-force simplex search on the 4-cell grid confirms g = 1") {
    // max of int f g over ||f||_{L^{2,1/2}} <= 1 for g = 1, by direct search
    // over nonnegative f on 4 cells.
    const auto gfun = GridFunction::constant(g, 1.0);
    double brute = 0.0;
    const int steps = 24;
    for (int a = 0; a <= steps; ++a)
      for (int b = 0; b <= steps; ++b)
        for (int c = 0; c <= steps; ++c)
          for (int d = 0; d <= steps; ++d) {
            if (a + b + c + d == 0) continue;
            const GridFunction f(g, {double(a), double(b), double(c), double(d)}, true);
            const double norm = morrey_norm(f, 2.0, 0.5).value;
            double pairing = 0.0;
            for (std::int64_t i = 0; i < 4; ++i) pairing += f[i] * gfun[i];
            brute = std::max(brute, pairing * g.cell_volume() / norm);
          }
    const double lb = dual_pairing_lower_bound(gfun, cfg_1d(2, 2, 0.5), 64, 3);
    CHECK(lb <= brute * (1 + 1e-9));
    CHECK(lb >= brute * 0.95);
    CHECK(lb == doctest::Approx(1.0).epsilon(1e-12));  // f = 1 is optimal here
  }
}

TEST_CASE("h-norm upper bound basics") {
  GridLayout g{1, 3, {}};
  const auto roster = small_roster(g, 0.5);
  SUBCASE("zero function has zero bound") {
    const auto nv = h_norm_upper_bound(GridFunction::zeros(g), 2.0, roster);
    CHECK(nv.value == 0.0);
  }
  SUBCASE("single candidate reproduces its integral") {
    Rng rng(12);
    const auto gf = oracle::random_lattice(g, rng);
    const std::span<const BasisCandidate> one(roster.data(), 1);
    const auto nv = h_norm_upper_bound(gf, 2.0, one);
    double direct = 0.0;
    for (std::int64_t i = 0; i < gf.size(); ++i)
      if (gf[i] > 0) direct += gf[i] * gf[i] / roster[0].b[i];
    CHECK(nv.value == doctest::Approx(std::sqrt(direct * g.cell_volume())).epsilon(1e-14));
  }
  SUBCASE("shrinking the candidate set never decreases the bound") {
    Rng rng(14);
    const auto gf = oracle::random_lattice(g, rng);
    const auto full = h_norm_upper_bound(gf, 2.0, roster).value;
    const std::span<const BasisCandidate> first3(roster.data(), 3);
    CHECK(full <= h_norm_upper_bound(gf, 2.0, first3).value * (1 + 1e-12));
  }
  SUBCASE("empty candidate list is an error") {
    CHECK_THROWS_AS(
        h_norm_upper_bound(GridFunction::zeros(g), 2.0, std::span<const BasisCandidate>{}),
        DomainError);
  }
  SUBCASE("candidate vanishing on supp g forces +inf") {
    const GridFunction gf(g, {0, 0, 0, 0, 0, 0, 0, 1}, true);
    BasisCandidate dead{GridFunction(g, {1, 1, 1, 1, 1, 1, 1, 0}, true), 1.0, 1.0, "user"};
    std::vector<BasisCandidate> v{dead};
    const auto nv = h_norm_upper_bound(gf, 2.0, v);
    CHECK(nv.infinite);
  }
}

TEST_CASE("Holder pairing with a fixed candidate") {
  Rng rng(21);
  GridLayout g{1, 4, {}};
  const auto roster = small_roster(g, 0.5);
  for (int t = 0; t < 40; ++t) {
    const auto f = oracle::random_lattice(g, rng);
    const auto h = oracle::random_lattice(g, rng);
    const double p = 1.5 + rng.unit();
    const double pc = p / (p - 1.0);
    for (const auto& cand : roster) {
      double lhs = 0.0, fp = 0.0, hp = 0.0;
      for (std::int64_t i = 0; i < f.size(); ++i) {
        lhs += f[i] * h[i];
        fp += std::pow(f[i], p) * cand.b[i];
        hp += std::pow(h[i], pc) * std::pow(cand.b[i], -pc / p);
      }
      const double vol = g.cell_volume();
      CHECK(lhs * vol <=
            std::pow(fp * vol, 1 / p) * std::pow(hp * vol, 1 / pc) * (1 + 1e-9));
    }
  }
}

TEST_CASE("normalized candidates are dominated by the Morrey norm") {
  // (int f^p b)^{1/p} <= ||f||_{L^{p,lambda}} for candidates with unit
  // Choquet integral; this is the layer-cake inequality, exact on the grid.
  Rng rng(23);
  GridLayout g{1, 4, {}};
  const double lambda = 0.5;
  const auto roster = small_roster(g, lambda);
  for (int t = 0; t < 30; ++t) {
    const auto f = oracle::random_lattice(g, rng);
    const double p = 1.5 + rng.unit();
    const double norm = morrey_norm(f, p, lambda).value;
    for (const auto& cand : roster) {
      double fp = 0.0;
      for (std::int64_t i = 0; i < f.size(); ++i) fp += std::pow(f[i], p) * cand.b[i];
      CHECK(std::pow(fp * g.cell_volume(), 1 / p) <= norm * (1 + 1e-9));
    }
  }
}

TEST_CASE("pairing lower bound sandwiches below the candidate upper bound") {
  Rng rng(29);
  GridLayout g{1, 4, {}};
  const auto roster = small_roster(g, 0.5);
  for (int t = 0; t < 25; ++t) {
    const auto gf = oracle::random_lattice(g, rng);
    const auto cfg = cfg_1d(2.0, 2.0, 0.5);
    const double lb = dual_pairing_lower_bound(gf, cfg, 16, 1000 + t);
    // pairing exponent p pairs against the dual-type norm at p' = 2
    const double ub = h_norm_upper_bound(gf, 2.0, roster).value;
    CHECK(lb <= ub * (1 + 1e-9));
  }
}

TEST_CASE("atomic decomposition reconstructs f and satisfies the atom bound") {
  Rng rng(37);
  GridLayout g{1, 4, {}};
  const auto cfg = cfg_1d(2.0, 2.0, 0.5);
  const auto roster = small_roster(g, 0.5);
  for (int t = 0; t < 30; ++t) {
    const auto f = oracle::random_lattice(g, rng);
    if (!(f.max_value() > 0.0)) continue;
    const auto& cand = roster[static_cast<std::size_t>(t) % roster.size()];
    const auto dec = atomic_decompose(f, cfg, cand);

    const auto rec = dec.reconstruct(g);
    for (std::int64_t i = 0; i < f.size(); ++i)
      CHECK(std::abs(rec[i] - f[i]) <= 1e-12 * std::max(1.0, f.max_value()));

    const double pc = cfg.pconj();
    std::vector<int> covered(static_cast<std::size_t>(g.cells()), 0);
    for (const auto& atom : dec.atoms) {
      const double lp = lebesgue_norm(atom.atom, cfg.p).value;
      const double bound = std::pow(atom.support.side(g.box), -cfg.lambda / pc);
      CHECK(lp <= bound * (1 + 1e-12));
      for (auto c : atom.carrier) ++covered[static_cast<std::size_t>(c)];
    }
    for (std::int64_t i = 0; i < f.size(); ++i)
      if (f[i] > 0.0) CHECK(covered[static_cast<std::size_t>(i)] == 1);

    CHECK(std::isfinite(dec.coeff_l1));
    CHECK(dec.coeff_l1 <= dec.holder_chain_bound * (1 + 1e-9));
    CHECK(dec.block_norm_upper() == dec.coeff_l1);
  }
}

TEST_CASE("single-block decomposition for an indicator against its own b1") {
  GridLayout g{1, 3, {}};
  const auto cfg = cfg_1d(2.0, 2.0, 0.5);
  const DyadicCube q(1, 1, {0});
  const auto b = make_b1(q, g, 0.5, 0.75);
  const auto f = masked(GridFunction::constant(g, 2.0), q);
  const auto dec = atomic_decompose(f, cfg, b);
  const auto rec = dec.reconstruct(g);
  for (std::int64_t i = 0; i < f.size(); ++i)
    CHECK(rec[i] == doctest::Approx(f[i]).epsilon(1e-14));
}

TEST_CASE("degenerate basis is rejected") {
  GridLayout g{1, 2, {}};
  const auto cfg = cfg_1d(2.0, 2.0, 0.5);
  const GridFunction f(g, {0, 0, 0, 1}, true);
  BasisCandidate dead{GridFunction(g, {1, 1, 1, 0}, true), 1.0, 1.0, "user"};
  CHECK_THROWS_AS(atomic_decompose(f, cfg, dead), DomainError);
}
