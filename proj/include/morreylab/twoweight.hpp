#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morreylab/content.hpp"
#include "morreylab/exponents.hpp"
#include "morreylab/grid_function.hpp"
#include "morreylab/norms.hpp"

namespace morreylab {

/// Outcome of one testing condition: the supremal value together with the
/// attaining cubes, the candidate that realized the infimum there, and the
/// exponent configuration. `companion` carries a secondary quantity (the
/// pairing lower bound for condition b, the empirical ratio for the
/// upper-triangle criterion).
struct ConditionReport {
  enum class Kind { a_est, b, c, d, e, sawyer, prop51 };

  Kind condition = Kind::b;
  double value = 0.0;
  bool infinite = false;
  DyadicCube witness_outer;
  std::optional<DyadicCube> witness_inner;
  std::optional<std::string> candidate_b;
  ExponentConfig config;
  double companion = 0.0;
  std::string companion_kind;
  std::vector<std::string> notes;

  static const char* kind_name(Kind k);
};

/// Knobs shared by the condition scans. The candidate infimum is taken over
/// the supplied library and, when `adaptive_b1` is set, additionally over the
/// normalized b1 candidate adapted to each outer cube, so reported values are
/// upper bounds for the true basis infima that stay scale-balanced at every
/// localization depth.
struct ConditionOptions {
  bool adaptive_b1 = true;
  int pairing_trials = 16;
  std::uint64_t seed = 7;
};

/// Condition (b): sup over dyadic Q of
///   (1/|Q|) ||u^{1/q} 1_Q||_{L^{q,lambda}} UB(v^{-1/p} 1_Q)
/// where UB is the candidate upper bound for the dual-type norm at exponent
/// p'. companion = the certified pairing lower bound at the witness cubes.
ConditionReport test_condition_b(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts = {});

/// Condition (c): max over Q0 of the per-Q0 candidate infimum of
///   ell(Q0)^{-lambda/q} sup_{Q in Q0} sigma(Q)^{-1/p}
///     (int_Q M[sigma 1_Q]^q u dx)^{1/q},   sigma = (bv)^{-p'/p}.
ConditionReport test_condition_c(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts = {});

/// Condition (d): max over Q0 of the per-Q0 candidate infimum of
///   ell(Q0)^{-lambda/q} sup_{Q in Q0}
///     (u(Q)^{1/q}/|Q|^{1/p}) (avg_Q (bv)^{-ap'/p})^{1/(ap')}.
ConditionReport test_condition_d(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg, double a,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts = {});

/// Condition (e), requires q < p with 1/q = 1/r + 1/p: max over Q0 of the
/// candidate infimum of
///   ell(Q0)^{-lambda/q} (int_{Q0} M[sigma]^r u^{r/q} (bv)^{r p'/p^2} dx)^{1/r}.
ConditionReport test_condition_e(const GridFunction& u, const GridFunction& v,
                                 const ExponentConfig& cfg,
                                 std::span<const BasisCandidate> candidates,
                                 const ConditionOptions& opts = {});

/// Sawyer's test: sup over dyadic Q of
///   (int_Q M[v^{-p'/p} 1_Q]^q u dx)^{1/q} / (int_Q v^{-p'/p} dx)^{1/p}.
ConditionReport test_sawyer(const GridFunction& u, const GridFunction& v, double p, double q);

enum class StoppingRhs { average, integral };

/// Principal cubes of (f, sigma) below Q0. Stopping children of F are the
/// maximal proper dyadic subcubes whose f-average against sigma strictly
/// exceeds twice that of F (the `integral` switch keeps the literal
/// unnormalized right-hand side). Carriers E(F) = F minus its stopping
/// children satisfy sigma(E(F)) >= sigma(F)/2 under the average rule.
struct PrincipalForest {
  struct Node {
    DyadicCube cube;
    int parent = -1;
    int generation = 0;
    std::vector<int> children;
    std::vector<std::int64_t> carrier_cells;
    double sigma_total = 0.0;    // integral of sigma over the cube
    double sigma_carrier = 0.0;  // integral of sigma over the carrier
  };

  DyadicCube q0;
  std::vector<Node> nodes;  // nodes[0] is Q0; generations come in order

  /// Index of the minimal principal cube containing q (q inside q0).
  int stopping_parent(const DyadicCube& q) const;
  bool eq35_holds(double rel_tol = 1e-12) const;
};

PrincipalForest build_principal_forest(const GridFunction& f, const GridFunction& sigma,
                                       const DyadicCube& q0,
                                       StoppingRhs rhs = StoppingRhs::average);

/// Which test functions the empirical operator-ratio sweep uses.
struct TestFamilySpec {
  bool cube_indicators = true;
  bool power_profiles = true;
  bool sigma_profiles = true;   // v^{-1/p}, v^{-p'/p}, and localized v^{-p'/p} 1_Q
  int random_sparse = 32;
  bool level_set_adapted = true;
  int localized_levels = 2;     // Q cubes for sigma 1_Q members: levels 0..this
};

/// Empirical lower bound for the operator ratio: the best
/// ||Mf||_{L^{q,lambda}(u)} / ||f||_{L^{p,lambda}(v)} over the family.
/// `localized` is the companion single-cube variant max over small Q0 of
///   (ell(Q0)^{-lambda} int_{Q0} (C_inf + M[f 1_{Q0}])^q u)^{1/q} / ||f||,
/// with C_inf the best average of f over strictly larger dyadic cubes.
struct EstimateReport {
  double global_value = 0.0;
  double localized_value = 0.0;
  std::string witness;
  int evaluated = 0;
  std::vector<std::string> skipped;
};

EstimateReport estimate_inequality(const GridFunction& u, const GridFunction& v,
                                   const ExponentConfig& cfg, const TestFamilySpec& family,
                                   std::uint64_t seed);

/// Upper-triangle criterion (q < p): value = ||u^{1/q} v^{1/p'}||_{L^r};
/// companion = empirical sup of ||Mf||_{L^q(u)} / ||f||_{L^p(v^{1-p})} over
/// the family. Requires a finite A_1 constant for v.
ConditionReport prop51_check(const GridFunction& u, const GridFunction& v,
                             const ExponentConfig& cfg, const TestFamilySpec& family = {},
                             std::uint64_t seed = 7);

}  // namespace morreylab
