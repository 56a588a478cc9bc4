#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morreylab/content.hpp"
#include "morreylab/exponents.hpp"
#include "morreylab/grid_function.hpp"

namespace morreylab {

/// A computed norm (or norm-like constant). For sup-type norms the witness
/// cube attains the value exactly; `witness2` carries the inner cube of
/// two-cube suprema.
struct NormValue {
  double value = 0.0;
  bool infinite = false;
  std::optional<DyadicCube> witness;
  std::optional<DyadicCube> witness2;
  std::string kind;
  std::string note;

  double as_double() const;  // +inf when the infinite flag is set
};

/// (int |f|^p w dx)^{1/p}, exact cell sum.
NormValue lebesgue_norm(const GridFunction& f, double p, const GridFunction* w = nullptr);

/// sup over dyadic Q of (ell(Q)^{-lambda} int_Q |f|^p w dx)^{1/p}, with an
/// attaining witness (largest such cube in scan order).
NormValue morrey_norm(const GridFunction& f, double p, double lambda,
                      const GridFunction* w = nullptr);
NormValue morrey_norm(const GridFunction& f, const ExponentConfig& cfg,
                      const GridFunction* w = nullptr);

/// Certified lower bound for the dual-type norm of g >= 0 indexed by exponent
/// p of cfg: the best pairing int f g dx over a family of test functions with
/// unit Morrey norm (cube indicators, power profiles, `trials` random sparse
/// functions).
double dual_pairing_lower_bound(const GridFunction& g, const ExponentConfig& cfg, int trials,
                                std::uint64_t seed = 7);

/// Upper bound for the basis-infimum norm at exponent `p`:
/// min over candidates b of (int |g|^p b^{1-p} dx)^{1/p}. Cells with b = 0 and
/// g != 0 force +inf for that candidate. The winning tag is recorded in note.
NormValue h_norm_upper_bound(const GridFunction& g, double p,
                             std::span<const BasisCandidate> candidates);
NormValue h_norm_upper_bound(const GridFunction& g, const ExponentConfig& cfg,
                             std::span<const BasisCandidate> candidates);

/// Constructive atomic decomposition driven by the level sets {b > 2^k} of a
/// basis candidate: carriers are cover cubes minus the next finer cover, and
/// coefficients are c = ell(Q)^{lambda/p'} (int_carrier f^p)^{1/p}.
/// Reconstruction is exact cell-wise and every atom a satisfies
/// ||a||_{L^p} = ell(Q)^{-lambda/p'}.
struct AtomicDecomposition {
  struct Atom {
    int k = 0;                              // threshold index: carrier sits in {b <= 2^{k+1}}
    double coeff = 0.0;
    DyadicCube support;
    GridFunction atom;
    std::vector<std::int64_t> carrier;
  };

  std::vector<Atom> atoms;
  std::string basis_tag;
  std::vector<int> thresholds_k;            // realized k with nonempty level set
  std::vector<double> cover_cost;           // sum ell(Q_{k,j})^lambda per threshold
  double coeff_l1 = 0.0;
  double holder_chain_bound = 0.0;          // (sum_k 2^{k+1} cost_k)^{1/p'} (int f^p b^{1-p})^{1/p}

  GridFunction reconstruct(const GridLayout& layout) const;
  /// Upper bound for the block norm: the l^1 coefficient mass of this
  /// decomposition.
  double block_norm_upper() const { return coeff_l1; }
};

AtomicDecomposition atomic_decompose(const GridFunction& f, const ExponentConfig& cfg,
                                     const BasisCandidate& b);

}  // namespace morreylab
