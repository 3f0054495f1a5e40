#include "finitekey/simulator.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "finitekey/parallel.hpp"

namespace finitekey {

namespace {

__extension__ using uint128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform integer in [0, bound) from a 64-bit engine (Lemire's method).
// Written out rather than using std::uniform_int_distribution so the stream
// is the same on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  uint128 product = static_cast<uint128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<uint128>(rng()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

std::int64_t run_chunk(const SimConfig& c, std::int64_t chunk, std::int64_t trials,
                       std::int64_t pe_allow, std::int64_t key_threshold) {
  std::mt19937_64 rng(splitmix64(c.seed ^ splitmix64(static_cast<std::uint64_t>(chunk))));
  // Positions [0, w) hold the errors. Partial Fisher-Yates leaves a
  // permutation behind, and drawing from any permutation is still uniform,
  // so the array is not reset between trials.
  std::vector<std::int32_t> slots(static_cast<std::size_t>(c.shape.m));
  std::iota(slots.begin(), slots.end(), 0);
  const auto m = static_cast<std::uint64_t>(c.shape.m);
  const auto k = static_cast<std::uint64_t>(c.shape.k);
  std::int64_t bad = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::int64_t pe_errors = 0;
    for (std::uint64_t i = 0; i < k; ++i) {
      const std::uint64_t j = i + bounded(rng, m - i);
      std::swap(slots[i], slots[j]);
      pe_errors += slots[i] < c.w ? 1 : 0;
    }
    const std::int64_t key_errors = c.w - pe_errors;
    if (pe_errors <= pe_allow && key_errors >= key_threshold) ++bad;
  }
  return bad;
}

void check(const SimConfig& c) {
  if (c.shape.k < 1 || c.shape.m <= c.shape.k || c.shape.n != c.shape.m - c.shape.k) {
    throw std::invalid_argument("simulate: invalid block shape");
  }
  if (c.w < 0 || c.w > c.shape.m) throw std::invalid_argument("simulate: w outside [0, m]");
  if (c.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
  if (!(c.delta >= 0.0 && c.delta < 0.5)) throw std::invalid_argument("simulate: delta outside [0, 1/2)");
  if (!(c.nu > 0.0)) throw std::invalid_argument("simulate: nu must be positive");
}

}  // namespace

ConfidenceInterval binomial_interval(std::int64_t successes, std::int64_t trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("binomial_interval: need 0 <= successes <= trials, trials >= 1");
  }
  const double alpha = 1.0 - level;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  if (successes < 30 || trials - successes < 30) {
    ConfidenceInterval ci;
    ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
    ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
    return ci;
  }
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
  const double p = x / n;
  const double half = z * std::sqrt(p * (1.0 - p) / n) + 0.5 / n;
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

SimReport simulate(const SimConfig& config) {
  check(config);
  const std::int64_t pe_allow = pe_error_allowance(config.shape.k, config.delta);
  const std::int64_t key_threshold = key_error_threshold(config.shape.n, config.delta, config.nu);

  const std::int64_t chunks = (config.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(chunks));
  detail::parallel_for(counts.size(), [&](std::size_t i) {
    const auto chunk = static_cast<std::int64_t>(i);
    const std::int64_t size = std::min(kTrialsPerChunk, config.trials - chunk * kTrialsPerChunk);
    counts[i] = run_chunk(config, chunk, size, pe_allow, key_threshold);
  });

  SimReport r;
  r.trials = config.trials;
  r.bad_event_count = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  r.frequency = static_cast<double>(r.bad_event_count) / static_cast<double>(r.trials);
  const ConfidenceInterval ci = binomial_interval(r.bad_event_count, r.trials);
  r.ci_low = std::min(ci.low, r.frequency);
  r.ci_high = std::max(ci.high, r.frequency);
  r.exact = exact_joint_ppe(config.shape, config.delta, config.nu, config.w);
  return r;
}

BoundSet default_bounds() {
  BoundSet b;
  b.serfling = [](const BlockShape& shape, double nu) {
    const double e = serfling_epe(shape, nu);
    return e * e;
  };
  b.lemma2 = [](const BlockShape& shape, double delta, const SlackParams& slack) {
    return lemma2_ppe_bound(shape, delta, slack).value;
  };
  return b;
}

std::vector<ValidationRow> validate_bounds(std::span<const ValidationEntry> grid,
                                           const BoundSet& bounds) {
  std::vector<ValidationRow> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ValidationRow& row = rows[i];
    row.entry = grid[i];
    const SimConfig& c = row.entry.config;
    try {
      row.report = simulate(c);
      row.serfling_bound = bounds.serfling(c.shape, c.nu);
      row.lemma2_bound = bounds.lemma2(c.shape, c.delta, SlackParams{c.nu, row.entry.xi});
    } catch (const std::exception& e) {
      row.error = e.what();
      continue;
    }
    const SimReport& r = row.report;
    // The exact value carries round-off of a few ulps.
    const double slack = 1e-12;
    row.exact_below_bounds = r.exact <= row.serfling_bound * (1.0 + slack) &&
                             r.exact <= row.lemma2_bound * (1.0 + slack);
    row.ci_covers_exact = r.ci_low <= r.exact * (1.0 + slack) && r.exact <= r.ci_high * (1.0 + slack);
    const double width = r.ci_high - r.ci_low;
    row.frequency_within_bounds =
        r.frequency <= row.serfling_bound + width && r.frequency <= row.lemma2_bound + width;
    row.pass = row.exact_below_bounds && row.ci_covers_exact;
  }
  return rows;
}

std::vector<ValidationEntry> default_validation_grid(std::int64_t trials, std::uint64_t seed) {
  std::vector<ValidationEntry> grid;
  std::uint64_t row = 0;
  for (std::int64_t m : {20, 30, 40, 50, 60}) {
    const BlockShape shape = BlockShape::make(m, m / 2);
    for (double delta : {0.05, 0.10}) {
      for (std::int64_t tenth = 1; tenth <= 5; ++tenth) {
        SimConfig c{shape, m * tenth / 10, delta, 0.3, trials, splitmix64(seed + row++)};
        grid.push_back(ValidationEntry{c, 0.1});
      }
    }
  }
  return grid;
}

}  // namespace finitekey
