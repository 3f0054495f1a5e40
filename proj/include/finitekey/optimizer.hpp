#pragma once

// Maximizes the secret-key length over x = (alpha, beta, nu, xi) subject to
// the security condition. alpha is eliminated analytically: for a given
// (beta, nu, xi) the largest admissible ell comes from key_length_at, so the
// search runs over three dimensions.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "finitekey/security.hpp"

namespace finitekey {

struct OptimizationPoint {
  double alpha = 0.0;  ///< ell / m
  double beta = 0.0;   ///< PE fraction, k = floor(beta m)
  double nu = 0.0;
  double xi = 0.0;     ///< 0 for the serfling variant
  std::int64_t k = 0;
};

struct KeyRateResult {
  std::int64_t m = 0;
  std::int64_t ell = 0;
  OptimizationPoint point;
  EpsilonBreakdown breakdown;
  Variant variant = Variant::lemma2;
  bool feasible = false;  ///< a positive key satisfies the security condition
};

/// Grid and refinement resolution. Defaults are what the CLI and the tests use.
struct SearchOptions {
  int beta_points = 10;      ///< beta in {0.05, 0.10, ..., 0.50}
  int nu_points = 60;        ///< log-spaced
  int xi_points = 40;        ///< evenly spaced in (0, nu)
  int refine_rounds = 8;
  int refine_points = 9;     ///< per dimension and round
  double shrink = 4.0;
};

/// Deterministic grid-plus-refinement maximization of ell. Throws
/// std::invalid_argument unless m >= 10 and 0 < delta < 1/2.
KeyRateResult optimize(std::int64_t m, double delta, const SecurityBudget& budget, Variant variant,
                       const SearchOptions& options = {});

struct MinBlockResult {
  Variant variant = Variant::lemma2;
  std::optional<std::int64_t> m_min;  ///< empty when nothing in range qualifies
  std::optional<KeyRateResult> at_min;
};

/// Smallest m in [m_lo, m_hi] with optimized ell >= 1: probe every `stride`
/// block lengths, then scan the last stride window below the first hit.
MinBlockResult min_block_length(double delta, const SecurityBudget& budget, Variant variant,
                                std::int64_t m_lo, std::int64_t m_hi, std::int64_t stride = 50,
                                const SearchOptions& options = {});

/// One row per (m, variant), m-major in input order.
std::vector<KeyRateResult> sweep(std::span<const std::int64_t> m_values, double delta,
                                 const SecurityBudget& budget, std::span<const Variant> variants,
                                 const SearchOptions& options = {});

}  // namespace finitekey
