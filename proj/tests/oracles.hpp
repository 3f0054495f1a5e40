#pragma once

// Independent reference computations for the test suites. Nothing here
// calls into the library's probability code.

#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

inline cpp_int binomial(std::int64_t n, std::int64_t r) {
  if (r < 0 || r > n) return 0;
  cpp_int out = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    out *= n - r + i;
    out /= i;
  }
  return out;
}

inline double to_double(const cpp_rational& q) { return q.convert_to<double>(); }

/// Pr[key errors >= key_threshold and PE errors <= pe_threshold] as an exact
/// fraction, by summing C(w, j) C(m - w, n - j) / C(m, n) over key counts j.
inline cpp_rational joint_tail(std::int64_t m, std::int64_t k, std::int64_t w,
                               std::int64_t key_threshold, std::int64_t pe_threshold) {
  const std::int64_t n = m - k;
  cpp_int hits = 0;
  for (std::int64_t j = 0; j <= std::min(w, n); ++j) {
    if (j >= key_threshold && w - j <= pe_threshold && w - j <= k) {
      hits += binomial(w, j) * binomial(m - w, n - j);
    }
  }
  return cpp_rational(hits, binomial(m, n));
}

/// Brute force over every k-subset of m positions (m <= 20). Errors sit at
/// positions [0, w). Entry [w][e] counts subsets whose PE sample holds
/// exactly e errors.
struct Enumeration {
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::int64_t subsets = 0;
  std::vector<std::vector<std::int64_t>> pe_histogram;

  Enumeration(std::int64_t m_, std::int64_t k_) : m(m_), k(k_) {
    pe_histogram.assign(static_cast<std::size_t>(m + 1),
                        std::vector<std::int64_t>(static_cast<std::size_t>(k + 1), 0));
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      if (std::popcount(mask) != k) continue;
      ++subsets;
      for (std::int64_t w = 0; w <= m; ++w) {
        const std::uint32_t errors = w == 32 ? ~0u : ((1u << w) - 1u);
        ++pe_histogram[static_cast<std::size_t>(w)]
                      [static_cast<std::size_t>(std::popcount(mask & errors))];
      }
    }
  }

  [[nodiscard]] cpp_rational event(std::int64_t w, std::int64_t key_threshold,
                                   std::int64_t pe_threshold) const {
    std::int64_t hits = 0;
    for (std::int64_t e = 0; e <= k; ++e) {
      const std::int64_t key_errors = w - e;
      if (key_errors >= key_threshold && e <= pe_threshold) {
        hits += pe_histogram[static_cast<std::size_t>(w)][static_cast<std::size_t>(e)];
      }
    }
    return cpp_rational(hits, subsets);
  }
};

}  // namespace oracle
