#pragma once

// Probability bounds for parameter estimation by random sampling without
// replacement, plus an exact hypergeometric oracle used as ground truth.
//
// Notation: a sifted block of m bits is split uniformly at random into a
// parameter-estimation (PE) sample of k bits and a raw key of n = m - k bits.

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace finitekey {

/// Raised when a bound is evaluated outside the region where it is proven.
/// Callers treat the bound as unavailable, never as a probability of 1.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BlockShape {
  std::int64_t m = 0;  ///< sifted block length
  std::int64_t k = 0;  ///< PE sample size
  std::int64_t n = 0;  ///< raw-key length, m - k

  /// Throws std::invalid_argument unless 1 <= k < m.
  static BlockShape make(std::int64_t m, std::int64_t k);
};

/// Deviation split. `nu` bounds the raw-key error rate above delta, `xi`
/// separates the block average from the PE sample average.
struct SlackParams {
  double nu = 0.0;
  double xi = 0.0;

  [[nodiscard]] double nu_prime() const { return nu - xi; }
};

/// Fixed-weight sampling question: w errors among m positions, k positions
/// drawn into the PE sample. The event is
///   {key errors >= key_threshold} and {PE errors <= pe_threshold}.
/// pe_threshold = k makes the PE side vacuous.
struct TailQuery {
  BlockShape shape;
  std::int64_t w = 0;
  std::int64_t key_threshold = 0;
  std::int64_t pe_threshold = 0;
};

struct HushScovelBound {
  double alpha_form = 1.0;  ///< exp(-2 alpha (n^2 dev^2 - 1))
  double gamma_form = 1.0;  ///< same with Gamma in place of alpha; never tighter
};

struct Lemma2Bound {
  double value = 1.0;          ///< clamped to [0, 1]
  bool clamped = false;        ///< the raw sum exceeded 1
  bool alpha_fallback = false; ///< m_err > floor(m/2): alpha form used
  std::int64_t m_err = 0;      ///< ceil(m (delta + xi))
  double sampling_term = 0.0;  ///< lower-tail Serfling term
  double hypergeometric_term = 0.0;
};

/// h2(x) in bits. Throws std::domain_error outside [0, 1].
double binary_entropy(double x);

/// Serfling-based PE error exp(-n k^2 nu^2 / (m (k+1))). Its square bounds
/// the joint bad-event probability.
double serfling_epe(const BlockShape& shape, double nu);

/// Bound on Pr[block average >= PE average + xi]: exp(-2 m k xi^2 / (n+1)).
double serfling_lower_tail(const BlockShape& shape, double xi);

/// 1/(m_err+1) + 1/(m-m_err+1). Throws std::invalid_argument outside [0, m].
double gamma_factor(std::int64_t m, std::int64_t m_err);

/// Hush-Scovel upper-tail bound for the raw-key error rate exceeding
/// m_err/m + dev when the block holds exactly m_err errors. Returns nullopt
/// when n^2 dev^2 <= 1, where the inequality says nothing.
std::optional<HushScovelBound> hush_scovel_tail(const BlockShape& shape,
                                                std::int64_t m_err, double dev);

/// ceil(m (delta + xi)).
std::int64_t assumed_error_count(std::int64_t m, double delta, double xi);

/// Two-term bound on Pr[PE passes and raw-key error rate >= delta + nu].
/// Throws PreconditionError unless 0 < xi < nu and n^2 (nu - xi)^2 > 1.
Lemma2Bound lemma2_ppe_bound(const BlockShape& shape, double delta,
                             const SlackParams& slack);

/// sqrt of lemma2_ppe_bound.
double new_epe(const BlockShape& shape, double delta, const SlackParams& slack);

/// Exact probability of the TailQuery event under uniform sampling without
/// replacement. Log-factorial terms with compensated summation.
double exact_hypergeometric_tail(const TailQuery& query);

/// Smallest raw-key error count j with j/n >= delta + nu.
std::int64_t key_error_threshold(std::int64_t n, double delta, double nu);

/// Largest PE error count e with e/k <= delta.
std::int64_t pe_error_allowance(std::int64_t k, double delta);

/// Exact Pr[PE error rate <= delta and raw-key error rate >= delta + nu]
/// for a block holding exactly w errors.
double exact_joint_ppe(const BlockShape& shape, double delta, double nu,
                       std::int64_t w);

}  // namespace finitekey
