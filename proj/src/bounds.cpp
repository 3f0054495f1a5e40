#include "finitekey/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace finitekey {

namespace {

// Slack absorbing decimal round-off when a rate times a count should land on
// an integer, e.g. 10 * (0.1 + 0.2).
constexpr double kIntegerSnap = 1e-9;

// Error of Stirling's approximation, log(x!) - [(x+1/2)log(x) - x + log(sqrt(2 pi))].
double stirling_error(double x) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (x <= 15.0) {
    const long double lx = x;
    const long double half_log_2pi = 0.918938533204672741780329736406L;
    return static_cast<double>(std::lgamma(lx + 1.0L) - (lx + 0.5L) * std::log(lx) + lx -
                               half_log_2pi);
  }
  const double xx = x * x;
  if (x > 500.0) return (s0 - s1 / xx) / x;
  if (x > 80.0) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (x > 35.0) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// Deviance term x log(x / np) + np - x, evaluated without cancellation.
double binomial_deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log of the binomial pmf Pr[Bin(size, p) = x], Loader's saddle-point form.
double log_binomial_pmf(double x, double size, double p, double q) {
  if (x == 0.0) {
    if (size == 0.0) return 0.0;
    return p < 0.1 ? -binomial_deviance(size, size * q) - size * p : size * std::log(q);
  }
  if (x == size) {
    return q < 0.1 ? -binomial_deviance(size, size * p) - size * q : size * std::log(p);
  }
  const double lc = stirling_error(size) - stirling_error(x) - stirling_error(size - x) -
                    binomial_deviance(x, size * p) - binomial_deviance(size - x, size * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / size);
  return lc - 0.5 * lf;
}

// log Pr[X = x] for X ~ Hypergeometric(population, marked, draws).
double log_hypergeometric_pmf(std::int64_t x, std::int64_t population, std::int64_t marked,
                              std::int64_t draws) {
  const auto total = static_cast<double>(population);
  const double p = static_cast<double>(draws) / total;
  const double q = static_cast<double>(population - draws) / total;
  const double l1 = log_binomial_pmf(static_cast<double>(x), static_cast<double>(marked), p, q);
  const double l2 = log_binomial_pmf(static_cast<double>(draws - x),
                                     static_cast<double>(population - marked), p, q);
  const double l3 = log_binomial_pmf(static_cast<double>(draws), total, p, q);
  return l1 + l2 - l3;
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_shape(const BlockShape& s) {
  if (s.k < 1 || s.m <= s.k || s.n != s.m - s.k) {
    throw std::invalid_argument("invalid block shape");
  }
}

}  // namespace

BlockShape BlockShape::make(std::int64_t m, std::int64_t k) {
  if (k < 1 || k >= m) {
    throw std::invalid_argument("block shape needs 1 <= k < m, got m=" + std::to_string(m) +
                                " k=" + std::to_string(k));
  }
  return BlockShape{m, k, m - k};
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double serfling_epe(const BlockShape& shape, double nu) {
  require_shape(shape);
  if (!(nu > 0.0)) throw std::invalid_argument("serfling_epe: nu must be positive");
  const auto m = static_cast<double>(shape.m);
  const auto k = static_cast<double>(shape.k);
  const auto n = static_cast<double>(shape.n);
  return std::exp(-n * k * k * nu * nu / (m * (k + 1.0)));
}

double serfling_lower_tail(const BlockShape& shape, double xi) {
  require_shape(shape);
  if (!(xi > 0.0)) throw std::invalid_argument("serfling_lower_tail: xi must be positive");
  const auto m = static_cast<double>(shape.m);
  const auto k = static_cast<double>(shape.k);
  const auto n = static_cast<double>(shape.n);
  return std::exp(-2.0 * m * k * xi * xi / (n + 1.0));
}

double gamma_factor(std::int64_t m, std::int64_t m_err) {
  if (m < 1 || m_err < 0 || m_err > m) {
    throw std::invalid_argument("gamma_factor: m_err outside [0, m]");
  }
  return 1.0 / static_cast<double>(m_err + 1) + 1.0 / static_cast<double>(m - m_err + 1);
}

std::optional<HushScovelBound> hush_scovel_tail(const BlockShape& shape, std::int64_t m_err,
                                                double dev) {
  require_shape(shape);
  const double gamma = gamma_factor(shape.m, m_err);
  const auto n = static_cast<double>(shape.n);
  const double excess = n * n * dev * dev - 1.0;
  if (!(dev > 0.0) || !(excess > 0.0)) return std::nullopt;
  const double sizes = 1.0 / (n + 1.0) + 1.0 / static_cast<double>(shape.k + 1);
  const double alpha = std::max(sizes, gamma);
  return HushScovelBound{std::exp(-2.0 * alpha * excess), std::exp(-2.0 * gamma * excess)};
}

std::int64_t assumed_error_count(std::int64_t m, double delta, double xi) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(m) * (delta + xi)));
}

Lemma2Bound lemma2_ppe_bound(const BlockShape& shape, double delta, const SlackParams& slack) {
  require_shape(shape);
  if (!(slack.xi > 0.0 && slack.xi < slack.nu)) {
    throw PreconditionError("lemma2 bound requires 0 < xi < nu");
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("lemma2 bound requires delta >= 0");
  const auto n = static_cast<double>(shape.n);
  const double nu_prime = slack.nu_prime();
  if (!(n * n * nu_prime * nu_prime > 1.0)) {
    throw PreconditionError("lemma2 bound requires n^2 (nu - xi)^2 > 1");
  }
  Lemma2Bound out;
  out.m_err = assumed_error_count(shape.m, delta, slack.xi);
  if (out.m_err > shape.m) throw PreconditionError("lemma2 bound requires delta + xi <= 1");

  const auto hs = hush_scovel_tail(shape, out.m_err, nu_prime);
  // Gamma is only known to be the weaker choice while m_err <= m/2.
  out.alpha_fallback = out.m_err > shape.m / 2;
  out.hypergeometric_term = out.alpha_fallback ? hs->alpha_form : hs->gamma_form;
  out.sampling_term = serfling_lower_tail(shape, slack.xi);

  const double raw = out.sampling_term + out.hypergeometric_term;
  out.clamped = raw > 1.0;
  out.value = out.clamped ? 1.0 : raw;
  return out;
}

double new_epe(const BlockShape& shape, double delta, const SlackParams& slack) {
  return std::sqrt(lemma2_ppe_bound(shape, delta, slack).value);
}

double exact_hypergeometric_tail(const TailQuery& query) {
  const BlockShape& s = query.shape;
  require_shape(s);
  if (query.w < 0 || query.w > s.m) {
    throw std::invalid_argument("exact_hypergeometric_tail: w outside [0, m]");
  }
  if (query.key_threshold < 0 || query.key_threshold > s.n || query.pe_threshold < 0 ||
      query.pe_threshold > s.k) {
    throw std::invalid_argument("exact_hypergeometric_tail: inconsistent thresholds");
  }
  // j counts errors landing in the raw key; the PE sample then holds w - j.
  const std::int64_t support_lo = std::max<std::int64_t>(0, query.w - s.k);
  const std::int64_t support_hi = std::min(query.w, s.n);
  const std::int64_t lo =
      std::max({support_lo, query.key_threshold, query.w - query.pe_threshold});
  if (lo > support_hi) return 0.0;
  if (lo == support_lo) return 1.0;

  // Terms rise to the mode then fall; stop once they no longer register.
  const auto mode = static_cast<std::int64_t>(
      std::floor(static_cast<double>((s.n + 1) * (query.w + 1)) / static_cast<double>(s.m + 2)));
  CompensatedSum acc;
  for (std::int64_t j = lo; j <= support_hi; ++j) {
    const double term = std::exp(log_hypergeometric_pmf(j, s.m, query.w, s.n));
    acc.add(term);
    if (j > mode && term < 1e-20 * acc.value()) break;
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

std::int64_t key_error_threshold(std::int64_t n, double delta, double nu) {
  return static_cast<std::int64_t>(
      std::ceil(static_cast<double>(n) * (delta + nu) - kIntegerSnap));
}

std::int64_t pe_error_allowance(std::int64_t k, double delta) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(k) * delta + kIntegerSnap));
}

double exact_joint_ppe(const BlockShape& shape, double delta, double nu, std::int64_t w) {
  require_shape(shape);
  if (w < 0 || w > shape.m) throw std::invalid_argument("exact_joint_ppe: w outside [0, m]");
  const std::int64_t key_threshold = std::max<std::int64_t>(0, key_error_threshold(shape.n, delta, nu));
  const std::int64_t pe_allow = std::clamp<std::int64_t>(pe_error_allowance(shape.k, delta), -1, shape.k);
  if (key_threshold > shape.n || pe_allow < 0) return 0.0;
  return exact_hypergeometric_tail(TailQuery{shape, w, key_threshold, pe_allow});
}

}  // namespace finitekey
