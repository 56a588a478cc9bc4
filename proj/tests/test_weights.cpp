#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "morreylab/rng.hpp"
#include "morreylab/weights.hpp"
#include "oracles.hpp"

using namespace morreylab;

TEST_CASE("power weight realizations") {
  SUBCASE("alpha = 0 realizes the constant 1") {
    GridLayout g{1, 3, {}};
    const auto pw = power_weight(0.0, {0.0}, g);
    for (std::int64_t i = 0; i < pw.realized.size(); ++i) CHECK(pw.realized[i] == 1.0);
  }
  SUBCASE("1d cell averages of x on [0,1) at L=2") {
    GridLayout g{1, 2, {}};
    const auto pw = power_weight(1.0, {0.0}, g);
    CHECK(pw.realized[0] == doctest::Approx(1.0 / 8).epsilon(1e-15));
    CHECK(pw.realized[1] == doctest::Approx(3.0 / 8).epsilon(1e-15));
    CHECK(pw.realized[2] == doctest::Approx(5.0 / 8).epsilon(1e-15));
    CHECK(pw.realized[3] == doctest::Approx(7.0 / 8).epsilon(1e-15));
  }
  SUBCASE("1d refinement consistency: coarse value is the mean of its children") {
    for (double alpha : {-0.6, -0.3, 0.5, 1.7}) {
      GridLayout coarse{1, 3, {}};
      GridLayout fine{1, 4, {}};
      const auto wc = power_weight(alpha, {0.25}, coarse);
      const auto wf = power_weight(alpha, {0.25}, fine);
      for (std::int64_t i = 0; i < wc.realized.size(); ++i)
        CHECK(wc.realized[i] ==
              doctest::Approx(0.5 * (wf.realized[2 * i] + wf.realized[2 * i + 1])).epsilon(1e-12));
    }
  }
  SUBCASE("singularity inside the box stays finite and positive") {
    GridLayout g{1, 4, {}};
    const auto pw = power_weight(-0.8, {0.5}, g);
    CHECK(pw.realized.min_value() > 0.0);
    CHECK(std::isfinite(pw.realized.max_value()));
  }
  SUBCASE("box shifted away from the singularity sees a smooth weight") {
    RootBox box;
    box.offset = {3.0};
    GridLayout g{1, 4, box};
    const auto pw = power_weight(-0.8, {0.0}, g);
    CHECK(pw.realized.min_value() > 0.0);
    // comparable values across the box: variation bounded by (inf/sup distance)^alpha
    CHECK(pw.realized.max_value() / pw.realized.min_value() <= std::pow(4.0 / 3.0, 0.8) + 1e-12);
  }
  SUBCASE("2d origin cell uses quadrature and stays finite") {
    GridLayout g{2, 3, {}};
    const auto pw = power_weight(-1.5, {0.0, 0.0}, g);
    CHECK(pw.realized.min_value() > 0.0);
    CHECK(std::isfinite(pw.realized[0]));
  }
  SUBCASE("NonIntegrable below -n") {
    GridLayout g{1, 2, {}};
    CHECK_THROWS_AS(power_weight(-1.0, {0.0}, g), DomainError);
    GridLayout g2{2, 2, {}};
    CHECK_THROWS_AS(power_weight(-2.0, {0.0, 0.0}, g2), DomainError);
  }
}

TEST_CASE("ap constant examples") {
  SUBCASE("constants have A_p constant 1") {
    GridLayout g{1, 3, {}};
    for (double p : {1.5, 2.0, 4.0})
      CHECK(ap_constant(GridFunction::constant(g, 7.0), p).value == 1.0);
  }
  SUBCASE("listed two-cell example") {
    GridLayout g{1, 1, {}};
    const GridFunction w(g, {1, 4}, true);
    const auto nv = ap_constant(w, 2.0);
    CHECK(nv.value == doctest::Approx(1.5625).epsilon(1e-15));
    CHECK(*nv.witness == DyadicCube::root(1));
  }
  SUBCASE("A_p constants are at least 1") {
    Rng rng(3);
    GridLayout g{1, 3, {}};
    for (int t = 0; t < 40; ++t) {
      const auto w = oracle::random_positive(g, rng, 10);
      CHECK(ap_constant(w, 2.0).value >= 1.0 - 1e-12);
    }
  }
  SUBCASE("zero cell reports infinity") {
    GridLayout g{1, 1, {}};
    CHECK(ap_constant(GridFunction(g, {0, 1}, true), 2.0).infinite);
  }
}

TEST_CASE("a1 constant examples") {
  GridLayout g{1, 1, {}};
  SUBCASE("constant weight") {
    CHECK(a1_constant(GridFunction::constant(g, 2.0)).value == 1.0);
  }
  SUBCASE("listed (1,4) example") {
    const auto nv = a1_constant(GridFunction(g, {1, 4}, true));
    CHECK(nv.value == 2.5);
    CHECK(*nv.witness == DyadicCube(1, 1, {0}));
  }
  SUBCASE("at least 1") {
    Rng rng(5);
    GridLayout g3{1, 3, {}};
    for (int t = 0; t < 40; ++t)
      CHECK(a1_constant(oracle::random_positive(g3, rng, 10)).value >= 1.0);
  }
}

TEST_CASE("A_p constants are scale invariant") {
  Rng rng(7);
  GridLayout g{1, 4, {}};
  for (int t = 0; t < 20; ++t) {
    const auto w = oracle::random_positive(g, rng, 10);
    const double base = ap_constant(w, 2.0).value;
    CHECK(ap_constant(w.cellwise([](double v) { return 2.0 * v; }, true), 2.0).value == base);
    CHECK(ap_constant(w.cellwise([](double v) { return 3.0 * v; }, true), 2.0).value ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("restricting the cube family never increases a sup-type constant") {
  // deeper grids scan strictly more cubes of the same weight
  for (double alpha : {-0.4, 0.5}) {
    GridLayout fine{1, 6, {}};
    const auto w = power_weight(alpha, {0.0}, fine);
    // recompute constants over the coarse subfamily by averaging down
    std::vector<double> coarse_cells(16, 0.0);
    for (std::int64_t i = 0; i < 16; ++i)
      for (int j = 0; j < 4; ++j) coarse_cells[static_cast<std::size_t>(i)] += w.realized[4 * i + j] / 4.0;
    GridLayout coarse{1, 4, {}};
    // the coarse grid's cube family is a subfamily: the constant cannot exceed
    // the fine one computed on compatible data
    const double fine_const = ap_constant(w.realized, 2.0).value;
    const double coarse_const = ap_constant(GridFunction(coarse, coarse_cells, true), 2.0).value;
    CHECK(coarse_const <= fine_const * (1 + 1e-9));
  }
}

TEST_CASE("admissible ranges match the closed forms") {
  const ExponentConfig cfg{1, 2.0, 2.0, 0.5, std::nullopt};
  const auto ap = admissible_range(RangeKind::ap, cfg);
  CHECK(ap.lo == -1.0);
  CHECK(ap.hi == 1.0);
  CHECK(!ap.lo_closed);
  CHECK(!ap.hi_closed);

  const auto sharp = admissible_range(RangeKind::morrey_sharp, cfg);
  CHECK(sharp.lo == -0.5);
  CHECK(sharp.hi == 1.5);
  CHECK(sharp.lo_closed);
  CHECK(!sharp.hi_closed);
  CHECK(sharp.contains(-0.5));
  CHECK(!sharp.contains(1.5));

  const auto cond = admissible_range(RangeKind::cond_1_2, cfg);
  CHECK(cond.lo == -0.5);
  CHECK(cond.hi == 1.0);
  CHECK(cond.lo_closed);
  CHECK(!cond.hi_closed);
}

TEST_CASE("power-weight A_p trend across the range boundary") {
  const auto constant_at = [](double alpha, int L) {
    GridLayout g{1, L, {}};
    return ap_constant(power_weight(alpha, {0.0}, g).realized, 2.0).value;
  };
  SUBCASE("inside the range the constant stabilizes under refinement") {
    for (double alpha : {-0.5, 0.0, 0.5}) {
      const double ratio = constant_at(alpha, 8) / constant_at(alpha, 6);
      CHECK(ratio >= 0.8);
      CHECK(ratio <= 1.25);
    }
  }
  SUBCASE("well outside the range the constant blows up under refinement") {
    for (double alpha : {1.6, 2.2}) {
      const double ratio = constant_at(alpha, 8) / constant_at(alpha, 6);
      CHECK(ratio > 2.0);
    }
  }
}

TEST_CASE("two-cube testing constant") {
  SUBCASE("w = 1 gives 1, attained at the root pair") {
    GridLayout g{1, 3, {}};
    const auto nv = cond_1_2_value(GridFunction::constant(g, 1.0), {1, 2.0, 2.0, 0.5, std::nullopt});
    CHECK(nv.value == 1.0);
    CHECK(*nv.witness == DyadicCube::root(1));
    CHECK(*nv.witness2 == DyadicCube::root(1));
  }
  SUBCASE("matches direct enumeration over pairs at L=3") {
    Rng rng(17);
    GridLayout g{1, 3, {}};
    const ExponentConfig cfg{1, 2.0, 2.0, 0.5, std::nullopt};
    for (int t = 0; t < 15; ++t) {
      const auto w = oracle::random_positive(g, rng, 10);
      const auto nv = cond_1_2_value(w, cfg);
      double brute = 0.0;
      for (int ko = 0; ko <= 3; ++ko)
        for (std::int64_t io = 0; io < g.cubes_at(ko); ++io) {
          const auto outer = DyadicCube::from_flat(1, ko, io);
          double dual = 0.0;
          std::int64_t cells = 0;
          for_each_cell(g, outer, [&](std::int64_t c) {
            dual += std::pow(w[c], -1.0);
            ++cells;
          });
          dual /= static_cast<double>(cells);
          for (int ki = ko; ki <= 3; ++ki)
            for (std::int64_t ii = 0; ii < g.cubes_at(ki); ++ii) {
              const auto inner = DyadicCube::from_flat(1, ki, ii);
              if (!outer.contains(inner)) continue;
              double mass = 0.0;
              for_each_cell(g, inner, [&](std::int64_t c) { mass += w[c]; });
              mass *= g.cell_volume();
              brute = std::max(brute, mass / std::pow(inner.side(g.box), 0.5) *
                                          std::pow(outer.side(g.box), 0.5) /
                                          outer.volume(g.box) * dual);
            }
        }
      CHECK(nv.value == doctest::Approx(brute).epsilon(1e-12));
    }
  }
  SUBCASE("power weight inside the testing range stays stable under refinement") {
    const ExponentConfig cfg{1, 2.0, 2.0, 0.5, std::nullopt};
    const auto value_at = [&](double alpha, int L) {
      GridLayout g{1, L, {}};
      return cond_1_2_value(power_weight(alpha, {0.0}, g).realized, cfg).value;
    };
    for (double alpha : {-0.3, 0.0, 0.5}) {
      const double ratio = value_at(alpha, 8) / value_at(alpha, 4);
      CHECK(ratio <= 1.6);
    }
    // below lambda - n the two-cube constant grows under refinement
    CHECK(value_at(-0.8, 8) > 1.5 * value_at(-0.8, 4));
  }
}
