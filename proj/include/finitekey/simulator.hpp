#pragma once

// Seeded Monte Carlo model of measurement sampling and the PE abort decision.
// A block of m positions carries exactly w errors; each trial draws k of them
// without replacement into the PE sample and records the bad event
//   PE errors <= floor(delta k)  and  raw-key errors >= ceil(n (delta + nu)).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finitekey/bounds.hpp"

namespace finitekey {

struct SimConfig {
  BlockShape shape;
  std::int64_t w = 0;
  double delta = 0.0;
  double nu = 0.0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
};

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};

struct SimReport {
  std::int64_t trials = 0;
  std::int64_t bad_event_count = 0;
  double frequency = 0.0;
  double ci_low = 0.0;   ///< 99% interval on the true probability
  double ci_high = 1.0;
  double exact = 0.0;    ///< exact_joint_ppe for the same configuration
};

/// Trials are split into fixed-size chunks, each with its own substream of
/// the master seed, so reports do not depend on the thread count.
inline constexpr std::int64_t kTrialsPerChunk = 16384;

/// Two-sided interval at `level`: Clopper-Pearson when fewer than 30
/// successes or failures, otherwise normal with continuity correction.
ConfidenceInterval binomial_interval(std::int64_t successes, std::int64_t trials,
                                     double level = 0.99);

/// Throws std::invalid_argument on an invalid configuration.
SimReport simulate(const SimConfig& config);

struct ValidationEntry {
  SimConfig config;
  double xi = 0.0;  ///< split used for the two-term bound
};

/// Bound providers, replaceable so that tests can inject a broken bound.
struct BoundSet {
  /// Serfling bound on the joint probability, serfling_epe squared.
  std::function<double(const BlockShape&, double nu)> serfling;
  /// Two-term bound on the joint probability.
  std::function<double(const BlockShape&, double delta, const SlackParams&)> lemma2;
};

BoundSet default_bounds();

struct ValidationRow {
  ValidationEntry entry;
  SimReport report;
  double serfling_bound = 0.0;
  double lemma2_bound = 0.0;
  bool exact_below_bounds = false;    ///< exact <= both bounds
  bool ci_covers_exact = false;
  bool frequency_within_bounds = false;  ///< frequency <= bound + CI width, both bounds
  bool pass = false;                  ///< exact_below_bounds && ci_covers_exact
  std::string error;                  ///< set when the entry could not be evaluated
};

/// One row per entry in input order. Entries that fail to evaluate are
/// reported as failing rows rather than aborting the run.
std::vector<ValidationRow> validate_bounds(std::span<const ValidationEntry> grid,
                                           const BoundSet& bounds = default_bounds());

/// m in {20, 30, 40, 50, 60} with k = m/2, delta in {0.05, 0.10},
/// (nu, xi) = (0.3, 0.1) and w = m/10, ..., m/2: fifty rows.
std::vector<ValidationEntry> default_validation_grid(std::int64_t trials, std::uint64_t seed);

}  // namespace finitekey
