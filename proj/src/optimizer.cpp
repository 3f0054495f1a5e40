#include "finitekey/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "finitekey/parallel.hpp"

namespace finitekey {

namespace {

constexpr double kMaxBeta = 0.5;

struct Candidate {
  bool valid = false;
  double beta = 0.0;
  double nu = 0.0;
  double xi = 0.0;
  std::int64_t k = 0;
  KeyLength key;
};

// Strict total order: larger ell, then smaller total error, then smaller
// nu, beta, xi. Independent of the order candidates were produced in.
bool better(const Candidate& a, const Candidate& b) {
  if (a.valid != b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.key.ell != b.key.ell) return a.key.ell > b.key.ell;
  const double ta = a.key.at_ell.breakdown.total;
  const double tb = b.key.at_ell.breakdown.total;
  if (ta != tb) return ta < tb;
  if (a.nu != b.nu) return a.nu < b.nu;
  if (a.beta != b.beta) return a.beta < b.beta;
  return a.xi < b.xi;
}

class Search {
 public:
  Search(std::int64_t m, double delta, const SecurityBudget& budget, Variant variant)
      : m_(m), delta_(delta), budget_(budget), variant_(variant) {}

  void consider(double beta, double nu, double xi) {
    Candidate c = evaluate(beta, nu, xi);
    if (better(c, best_)) best_ = std::move(c);
  }

  [[nodiscard]] const Candidate& best() const { return best_; }
  [[nodiscard]] std::int64_t m() const { return m_; }
  [[nodiscard]] double nu_max() const { return 0.5 - delta_; }
  [[nodiscard]] Variant variant() const { return variant_; }

 private:
  Candidate evaluate(double beta, double nu, double xi) const {
    Candidate c;
    c.beta = beta;
    c.nu = nu;
    c.xi = variant_ == Variant::serfling ? 0.0 : xi;
    if (!(beta > 0.0 && beta <= kMaxBeta)) return c;
    c.k = static_cast<std::int64_t>(std::floor(beta * static_cast<double>(m_)));
    if (c.k < 1 || c.k >= m_) return c;
    if (!(nu > 0.0 && nu < nu_max())) return c;
    const BlockShape shape{m_, c.k, m_ - c.k};
    if (variant_ == Variant::lemma2) {
      if (!(c.xi > 0.0 && c.xi < nu)) return c;
      const double spread = static_cast<double>(shape.n) * (nu - c.xi);
      if (!(spread * spread > 1.0)) return c;
    }
    c.key = key_length_at(make_settings(shape, delta_, budget_), budget_, SlackParams{nu, c.xi},
                          variant_);
    c.valid = c.key.at_ell.reason.empty();
    return c;
  }

  std::int64_t m_;
  double delta_;
  SecurityBudget budget_;
  Variant variant_;
  Candidate best_;
};

void coarse_grid(Search& search, const SearchOptions& opt) {
  const bool split = search.variant() == Variant::lemma2;
  for (int b = 1; b <= opt.beta_points; ++b) {
    const double beta = kMaxBeta * b / opt.beta_points;
    const auto k = static_cast<std::int64_t>(std::floor(beta * static_cast<double>(search.m())));
    const std::int64_t n = search.m() - k;
    if (k < 1 || n < 1) continue;
    const double lo = 1.1 / static_cast<double>(n);
    const double hi = search.nu_max();
    if (!(lo < hi)) continue;
    const double log_step = std::log(hi / lo) / (opt.nu_points + 1);
    for (int i = 1; i <= opt.nu_points; ++i) {
      const double nu = lo * std::exp(log_step * i);
      if (!split) {
        search.consider(beta, nu, 0.0);
        continue;
      }
      for (int j = 1; j <= opt.xi_points; ++j) {
        search.consider(beta, nu, nu * j / (opt.xi_points + 1));
      }
    }
  }
}

void refine(Search& search, const SearchOptions& opt) {
  if (!search.best().valid) return;
  const bool split = search.variant() == Variant::lemma2;
  const Candidate& start = search.best();
  const auto n0 = static_cast<double>(search.m() - start.k);
  const double nu_ratio =
      std::exp(std::log(search.nu_max() * n0 / 1.1) / (opt.nu_points + 1));
  double h_beta = kMaxBeta / opt.beta_points;
  double h_nu = start.nu * (nu_ratio - 1.0);
  double h_xi = start.nu / (opt.xi_points + 1);

  const int p = std::max(opt.refine_points, 2);
  auto offsets = [p](double h) {
    std::vector<double> out(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) out[static_cast<std::size_t>(i)] = h * (2.0 * i / (p - 1) - 1.0);
    return out;
  };

  for (int round = 0; round < opt.refine_rounds; ++round) {
    const Candidate centre = search.best();
    const auto db = offsets(h_beta);
    const auto dn = offsets(h_nu);
    const auto dx = split ? offsets(h_xi) : std::vector<double>{0.0};
    for (double b : db) {
      for (double v : dn) {
        for (double x : dx) search.consider(centre.beta + b, centre.nu + v, centre.xi + x);
      }
    }
    h_beta /= opt.shrink;
    h_nu /= opt.shrink;
    h_xi /= opt.shrink;
  }
}

}  // namespace

KeyRateResult optimize(std::int64_t m, double delta, const SecurityBudget& budget, Variant variant,
                       const SearchOptions& options) {
  if (m < 10) throw std::invalid_argument("optimize: m must be >= 10");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("optimize: delta outside (0, 1/2)");

  Search search(m, delta, budget, variant);
  coarse_grid(search, options);
  refine(search, options);

  KeyRateResult out;
  out.m = m;
  out.variant = variant;
  out.breakdown.variant = variant;
  const Candidate& best = search.best();
  if (!best.valid) return out;
  out.ell = best.key.ell;
  out.point = OptimizationPoint{static_cast<double>(best.key.ell) / static_cast<double>(m),
                                best.beta, best.nu, best.xi, best.k};
  out.breakdown = best.key.at_ell.breakdown;
  out.feasible = out.ell >= 1 && best.key.at_ell.feasible;
  return out;
}

MinBlockResult min_block_length(double delta, const SecurityBudget& budget, Variant variant,
                                std::int64_t m_lo, std::int64_t m_hi, std::int64_t stride,
                                const SearchOptions& options) {
  if (!(m_lo < m_hi)) throw std::invalid_argument("min_block_length: need m_lo < m_hi");
  if (m_lo < 10) throw std::invalid_argument("min_block_length: m_lo must be >= 10");
  if (stride < 1) throw std::invalid_argument("min_block_length: stride must be >= 1");

  MinBlockResult out;
  out.variant = variant;
  auto run = [&](std::int64_t m) { return optimize(m, delta, budget, variant, options); };

  std::int64_t previous = m_lo - 1;
  for (std::int64_t m = m_lo;; m = std::min(m + stride, m_hi)) {
    KeyRateResult hit = run(m);
    if (hit.ell >= 1) {
      // Scan (previous, m) and keep the smallest qualifying length.
      const std::int64_t width = m - previous - 1;
      std::vector<KeyRateResult> window(static_cast<std::size_t>(std::max<std::int64_t>(width, 0)));
      detail::parallel_for(window.size(), [&](std::size_t i) {
        window[i] = run(previous + 1 + static_cast<std::int64_t>(i));
      });
      for (auto& row : window) {
        if (row.ell >= 1) {
          out.m_min = row.m;
          out.at_min = std::move(row);
          return out;
        }
      }
      out.m_min = m;
      out.at_min = std::move(hit);
      return out;
    }
    if (m == m_hi) break;
    previous = m;
  }
  return out;
}

std::vector<KeyRateResult> sweep(std::span<const std::int64_t> m_values, double delta,
                                 const SecurityBudget& budget, std::span<const Variant> variants,
                                 const SearchOptions& options) {
  if (m_values.empty()) throw std::invalid_argument("sweep: no block lengths given");
  std::vector<KeyRateResult> rows(m_values.size() * variants.size());
  detail::parallel_for(rows.size(), [&](std::size_t i) {
    const std::int64_t m = m_values[i / variants.size()];
    const Variant v = variants[i % variants.size()];
    rows[i] = optimize(m, delta, budget, v, options);
  });
  return rows;
}

}  // namespace finitekey
