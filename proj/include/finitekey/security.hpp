#pragma once

// Security condition for the entanglement-based protocol with random
// sampling: correctness + 2 * eps_pe + eps_pa <= eps_qkd.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "finitekey/bounds.hpp"

namespace finitekey {

/// Which parameter-estimation error function enters the security condition.
enum class Variant {
  serfling,  ///< single Serfling tail
  lemma2,    ///< two-term bound with the (nu, xi) split
};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

struct ProtocolSettings {
  BlockShape shape;
  double delta = 0.0;    ///< tolerated error rate, (0, 1/2)
  std::int64_t t = 1;    ///< verification-hash length in bits
  std::int64_t r = 0;    ///< error-correction leakage in bits
  std::int64_t ell = 0;  ///< candidate secret-key length in bits
};

struct SecurityBudget {
  int s = 0;                 ///< eps_qkd = 10^-s
  double eps_qkd = 0.0;
  std::int64_t t = 0;        ///< smallest t with 2^-t <= 10^-(s+2)
  double eps_correct = 0.0;  ///< 2^-t

  static SecurityBudget from_exponent(int s);
};

struct EpsilonBreakdown {
  double eps_correct = 0.0;
  double eps_pe = 0.0;
  double eps_pa = 0.0;
  double total = 0.0;  ///< eps_correct + 2 eps_pe + eps_pa
  Variant variant = Variant::lemma2;
};

struct Feasibility {
  EpsilonBreakdown breakdown;
  bool feasible = false;
  std::string reason;  ///< non-empty when a bound precondition failed
};

/// Achievable key length at a fixed (shape, delta, nu, xi).
struct KeyLength {
  std::int64_t ell = 0;
  /// Unfloored solution of the security condition for ell; -infinity when
  /// the PE and correctness terms alone exhaust the budget.
  double continuous_ell = 0.0;
  double remaining_budget = 0.0;  ///< eps_qkd - 2^-t - 2 eps_pe
  Feasibility at_ell;             ///< condition re-evaluated at `ell`
};

/// Privacy-amplification error (1/2) sqrt(2^(-n(1-h2(delta+nu)) + r + t + ell)).
/// May exceed 1.
double eps_pa(const ProtocolSettings& settings, double nu);

/// ceil(1.19 h2(delta) n).
std::int64_t ec_leakage(std::int64_t n, double delta);

/// ceil((s+2) log2 10).
std::int64_t correctness_bits(int s);

/// Settings with t from the budget and r from ec_leakage.
ProtocolSettings make_settings(const BlockShape& shape, double delta,
                               const SecurityBudget& budget, std::int64_t ell = 0);

/// Evaluates the security condition. Bound precondition failures come back
/// as infeasible with a reason rather than as exceptions. xi is ignored for
/// the serfling variant.
Feasibility feasible(const ProtocolSettings& settings, const SecurityBudget& budget,
                     const SlackParams& slack, Variant variant);

/// Largest ell the condition admits at this slack, with the analytic guess
/// confirmed by probing feasible() at ell and ell + 1. settings.ell is ignored.
KeyLength key_length_at(const ProtocolSettings& settings, const SecurityBudget& budget,
                        const SlackParams& slack, Variant variant);

std::int64_t max_ell_at(const ProtocolSettings& settings, const SecurityBudget& budget,
                        const SlackParams& slack, Variant variant);

/// Number of protocol runs v with v * eps_qkd <= eps_stream.
std::int64_t stream_budget(double eps_stream, double eps_qkd);

}  // namespace finitekey
