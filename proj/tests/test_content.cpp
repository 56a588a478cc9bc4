#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "morreylab/content.hpp"
#include "morreylab/maximal.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/rng.hpp"
#include "morreylab/weights.hpp"
#include "oracles.hpp"

using namespace morreylab;

TEST_CASE("content of a full dyadic cube is ell(Q)^alpha with the one-cube cover") {
  GridLayout g{1, 3, {}};
  for (double alpha : {0.3, 0.7, 1.0}) {
    const DyadicCube q(1, 2, {3});
    CellSet e = CellSet::none(g);
    for_each_cell(g, q, [&](std::int64_t i) { e.mask[static_cast<std::size_t>(i)] = 1; });
    const auto r = hausdorff_content(e, alpha);
    CHECK(r.value == std::pow(0.25, alpha));
    REQUIRE(r.cover.size() == 1);
    CHECK(r.cover[0] == q);
  }
}

TEST_CASE("listed example: cells {0,3} at L=2 with alpha=1") {
  GridLayout g{1, 2, {}};
  const auto r = hausdorff_content(CellSet::from_indices(g, {0, 3}), 1.0);
  CHECK(r.value == 0.5);
  REQUIRE(r.cover.size() == 2);
  CHECK(r.cover[0] == DyadicCube(1, 2, {0}));
  CHECK(r.cover[1] == DyadicCube(1, 2, {3}));
}

TEST_CASE("empty set has zero content; alpha is validated") {
  GridLayout g{1, 2, {}};
  CHECK(hausdorff_content(CellSet::none(g), 0.5).value == 0.0);
  CHECK_THROWS_AS(hausdorff_content(CellSet::from_indices(g, {0}), 0.0), DomainError);
  CHECK_THROWS_AS(hausdorff_content(CellSet::from_indices(g, {0}), 1.5), DomainError);
}

TEST_CASE("DP equals exhaustive cover minimization exactly (8-cell grid)") {
  GridLayout g{1, 3, {}};
  for (double alpha : {0.3, 0.5, 1.0}) {
    for (int bits = 1; bits < 256; ++bits) {
      std::vector<std::int64_t> cells;
      for (int c = 0; c < 8; ++c)
        if (bits & (1 << c)) cells.push_back(c);
      const auto e = CellSet::from_indices(g, cells);
      const auto dp = hausdorff_content(e, alpha);
      CHECK(dp.value == oracle::brute_content(e, alpha));

      // witness cover is disjoint, covers E, and reproduces the value
      const auto covered = dp.cover_cells(g);
      CHECK(e.subset_of(covered));
      std::int64_t cell_total = 0;
      double cost = 0.0;
      for (const auto& q : dp.cover) {
        cell_total += cube_cell_count(g, q);
        cost += std::pow(q.side(g.box), alpha);
      }
      CHECK(cell_total == covered.count());  // pairwise disjoint
      CHECK(cost == doctest::Approx(dp.value).epsilon(1e-15));
    }
  }
}

TEST_CASE("content is monotone and subadditive") {
  Rng rng(8);
  GridLayout g{2, 2, {}};
  for (int t = 0; t < 80; ++t) {
    std::vector<std::int64_t> a, b;
    for (std::int64_t c = 0; c < g.cells(); ++c) {
      if (rng.unit() < 0.3) a.push_back(c);
      if (rng.unit() < 0.3) b.push_back(c);
    }
    const auto ea = CellSet::from_indices(g, a);
    const auto eb = CellSet::from_indices(g, b);
    const auto eu = ea.unioned(eb);
    const double alpha = 0.4 + rng.unit();
    const double ha = hausdorff_content(ea, alpha).value;
    const double hu = hausdorff_content(eu, alpha).value;
    CHECK(ha <= hu * (1 + 1e-12));
    CHECK(hu <= (ha + hausdorff_content(eb, alpha).value) * (1 + 1e-12));
  }
}

TEST_CASE("minimizing covers of nested sets nest") {
  Rng rng(88);
  GridLayout g{1, 4, {}};
  for (int t = 0; t < 60; ++t) {
    const auto f = oracle::random_lattice(g, rng, 8, 0.1);
    const double t1 = rng.lattice(8);
    const double t2 = t1 + rng.lattice(8);
    const auto big = CellSet::above(f, t1);
    const auto small = CellSet::above(f, t2);
    if (!small.any() || !big.any()) continue;
    const auto cover_big = hausdorff_content(big, 0.5).cover_cells(g);
    const auto cover_small = hausdorff_content(small, 0.5).cover_cells(g);
    CHECK(cover_small.subset_of(cover_big));
  }
}

TEST_CASE("choquet integral examples") {
  SUBCASE("single level set") {
    GridLayout g{1, 2, {}};
    const GridFunction phi(g, {2, 2, 0, 0}, true);
    CHECK(choquet_integral(phi, 1.0) == 1.0);
  }
  SUBCASE("zero integrand") {
    GridLayout g{1, 2, {}};
    CHECK(choquet_integral(GridFunction::zeros(g), 0.5) == 0.0);
  }
  SUBCASE("full box at height 1 gives ell(root)^alpha") {
    RootBox box;
    box.scale = 2.0;
    GridLayout g{1, 2, box};
    const auto phi = GridFunction::constant(g, 1.0);
    CHECK(choquet_integral(phi, 0.5) == std::pow(2.0, 0.5));
  }
}

TEST_CASE("choquet integral is monotone and positively homogeneous") {
  Rng rng(13);
  GridLayout g{1, 3, {}};
  for (int t = 0; t < 40; ++t) {
    const auto phi = oracle::random_lattice(g, rng);
    const auto psi = combine(phi, oracle::random_lattice(g, rng),
                             [](double a, double b) { return a + b; }, true);
    const double alpha = 0.3 + 0.6 * rng.unit();
    const double cphi = choquet_integral(phi, alpha);
    CHECK(cphi <= choquet_integral(psi, alpha) * (1 + 1e-12));
    CHECK(choquet_integral(phi.cellwise([](double v) { return 2.0 * v; }, true), alpha) ==
          2.0 * cphi);
    const double c3 = choquet_integral(phi.cellwise([](double v) { return 3.0 * v; }, true), alpha);
    CHECK(c3 == doctest::Approx(3.0 * cphi).epsilon(1e-12));
  }
}

TEST_CASE("layer-cake domination: int f^p phi dx <= ||f||^p * choquet(phi)") {
  Rng rng(17);
  for (int t = 0; t < 60; ++t) {
    GridLayout g{t % 2 ? 2 : 1, t % 2 ? 2 : 4, {}};
    const auto f = oracle::random_lattice(g, rng);
    const auto phi = oracle::random_lattice(g, rng);
    const double p = 1.0 + 2.0 * rng.unit();
    const double lambda = (0.2 + 0.6 * rng.unit()) * g.dim;
    double lhs = 0.0;
    for (std::int64_t i = 0; i < f.size(); ++i) lhs += std::pow(f[i], p) * phi[i];
    lhs *= g.cell_volume();
    const double norm = morrey_norm(f, p, lambda).value;
    const double rhs = std::pow(norm, p) * choquet_integral(phi, lambda);
    CHECK(lhs <= rhs * (1 + 1e-9));
  }
}

TEST_CASE("b1 candidates are normalized with finite A1 constant") {
  GridLayout g{1, 5, {}};
  SUBCASE("root cube gives a constant candidate") {
    const auto b = make_b1(DyadicCube::root(1), g, 0.5, 0.75);
    CHECK(b.choquet == doctest::Approx(1.0).epsilon(1e-12));
    for (std::int64_t i = 1; i < b.b.size(); ++i) CHECK(b.b[i] == b.b[0]);
    CHECK(b.a1_const == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("inner cubes normalize too") {
    for (int level : {1, 2, 3}) {
      const auto b = make_b1(DyadicCube::from_flat(1, level, 1), g, 0.5, 0.75);
      CHECK(b.choquet == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::isfinite(b.a1_const));
      CHECK(b.a1_const >= 1.0);
    }
  }
  SUBCASE("exponent ordering is validated") {
    CHECK_THROWS_AS(make_b1(DyadicCube::root(1), g, 0.75, 0.5), DomainError);
    CHECK_THROWS_AS(make_b1(DyadicCube::root(1), g, 0.5, 1.0), DomainError);
  }
}

TEST_CASE("normalizer of M[1_Q]^{lambda0/n}/ell^lambda is uniformly bounded (levels 0..4)") {
  GridLayout g{1, 8, {}};
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k <= 4; ++k)
    for (std::int64_t i = 0; i < g.cubes_at(k); ++i) {
      const double c = b1_normalizer(DyadicCube::from_flat(1, k, i), g, 0.5, 0.75);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  CHECK(hi / lo <= 4.0);
  CHECK(lo >= 1.0);  // the level set {M[1_Q] = 1} already contributes ell^lambda
}

TEST_CASE("b2 candidates normalize; the A1 constant of the power part is stable") {
  GridLayout g6{1, 6, {}};
  GridLayout g8{1, 8, {}};
  const auto b6 = make_b2(g6, 0.5, 0.75, 0.25);
  const auto b8 = make_b2(g8, 0.5, 0.75, 0.25);
  CHECK(b6.choquet == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b8.choquet == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(b6.a1_const));
  CHECK(b8.a1_const / b6.a1_const >= 0.8);
  CHECK(b8.a1_const / b6.a1_const <= 1.25);
}

TEST_CASE("b2 validation") {
  GridLayout g{1, 4, {}};
  CHECK_THROWS_AS(make_b2(g, 0.5, 0.5, 0.25), DomainError);   // lambda1 == lambda
  CHECK_THROWS_AS(make_b2(g, 0.5, 1.0, 0.25), DomainError);   // lambda1 >= n
  CHECK_THROWS_AS(make_b2(g, 0.5, -0.1, 0.25), DomainError);  // lambda1 <= 0
  CHECK_THROWS(make_b2(g, 0.5, 0.75, 0.0));
}

TEST_CASE("discrete Choquet integral of the cut power weight tracks the closed form") {
  // Convergent regime lambda1 < lambda; the closed form diverges otherwise.
  const double lambda = 0.75, lambda1 = 0.5, d = 0.25;
  const double closed = b2_continuum_choquet(lambda, lambda1, d);
  CHECK(closed == doctest::Approx(3.0 * std::pow(0.5, 0.25)).epsilon(1e-12));

  GridLayout g{1, 8, {}};
  const auto pw = power_weight(-lambda1, {0.0}, g);
  const GridFunction cut = GridFunction::of(
      g, [&](std::int64_t i) { return g.cell_center(i, 0) < 2.0 * d ? pw.realized[i] : 0.0; },
      true);
  const double discrete = choquet_integral(cut, lambda);
  CHECK(std::abs(discrete - closed) / closed <= 0.2);

  CHECK_THROWS_AS(b2_continuum_choquet(0.5, 0.75, 0.25), DomainError);
}

TEST_CASE("default roster has cube-adapted b1 members and admissible b2 members") {
  GridLayout g{1, 4, {}};
  const auto roster = default_roster(g, 0.5);
  // 15 b1 cubes at levels 0..3 plus b2 for lambda1 = 0.75 with two radii
  CHECK(roster.size() == 17);
  for (const auto& cand : roster) {
    CHECK(cand.choquet == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(std::isfinite(cand.a1_const));
  }
}
