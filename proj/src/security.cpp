#include "finitekey/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace finitekey {

namespace {

constexpr double kLeakageEfficiency = 1.19;

// log2 of eps_pa; the exponent can run to thousands of bits either way.
double log2_eps_pa(const ProtocolSettings& s, double nu) {
  const auto n = static_cast<double>(s.shape.n);
  const double x = std::min(s.delta + nu, 1.0);
  const double exponent = -n * (1.0 - binary_entropy(x)) + static_cast<double>(s.r + s.t + s.ell);
  return 0.5 * exponent - 1.0;
}

// eps_pe, or an explanation of why the bound is unavailable.
struct PeTerm {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string reason;
};

PeTerm pe_term(const ProtocolSettings& s, const SlackParams& slack, Variant variant) {
  try {
    if (variant == Variant::serfling) return {serfling_epe(s.shape, slack.nu), {}};
    return {new_epe(s.shape, s.delta, slack), {}};
  } catch (const std::exception& e) {
    return {std::numeric_limits<double>::quiet_NaN(), e.what()};
  }
}

Feasibility assemble(const ProtocolSettings& s, const SecurityBudget& budget, double nu,
                     const PeTerm& pe, Variant variant) {
  Feasibility out;
  out.breakdown.variant = variant;
  out.breakdown.eps_correct = std::exp2(-static_cast<double>(s.t));
  out.breakdown.eps_pe = pe.value;
  if (!pe.reason.empty()) {
    out.breakdown.eps_pa = std::numeric_limits<double>::quiet_NaN();
    out.breakdown.total = std::numeric_limits<double>::quiet_NaN();
    out.reason = pe.reason;
    return out;
  }
  out.breakdown.eps_pa = std::exp2(log2_eps_pa(s, nu));
  out.breakdown.total = out.breakdown.eps_correct + 2.0 * out.breakdown.eps_pe + out.breakdown.eps_pa;
  out.feasible = out.breakdown.total <= budget.eps_qkd;
  return out;
}

}  // namespace

std::string_view to_string(Variant v) {
  return v == Variant::serfling ? "serfling" : "lemma2";
}

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "serfling") return Variant::serfling;
  if (text == "lemma2") return Variant::lemma2;
  return std::nullopt;
}

SecurityBudget SecurityBudget::from_exponent(int s) {
  if (s < 1) throw std::invalid_argument("security exponent must be >= 1");
  SecurityBudget b;
  b.s = s;
  b.eps_qkd = std::pow(10.0, -s);
  b.t = correctness_bits(s);
  b.eps_correct = std::exp2(-static_cast<double>(b.t));
  return b;
}

double eps_pa(const ProtocolSettings& settings, double nu) {
  return std::exp2(log2_eps_pa(settings, nu));
}

std::int64_t ec_leakage(std::int64_t n, double delta) {
  if (n < 1) throw std::invalid_argument("ec_leakage: n must be >= 1");
  return static_cast<std::int64_t>(
      std::ceil(kLeakageEfficiency * binary_entropy(delta) * static_cast<double>(n)));
}

std::int64_t correctness_bits(int s) {
  if (s < 1) throw std::invalid_argument("correctness_bits: s must be >= 1");
  return static_cast<std::int64_t>(std::ceil((s + 2) * std::numbers::ln10 / std::numbers::ln2));
}

ProtocolSettings make_settings(const BlockShape& shape, double delta, const SecurityBudget& budget,
                               std::int64_t ell) {
  return ProtocolSettings{shape, delta, budget.t, ec_leakage(shape.n, delta), ell};
}

Feasibility feasible(const ProtocolSettings& settings, const SecurityBudget& budget,
                     const SlackParams& slack, Variant variant) {
  return assemble(settings, budget, slack.nu, pe_term(settings, slack, variant), variant);
}

KeyLength key_length_at(const ProtocolSettings& settings, const SecurityBudget& budget,
                        const SlackParams& slack, Variant variant) {
  KeyLength out;
  const PeTerm pe = pe_term(settings, slack, variant);
  ProtocolSettings probe = settings;
  probe.ell = 0;

  auto finish = [&](std::int64_t ell) {
    probe.ell = ell;
    out.ell = ell;
    out.at_ell = assemble(probe, budget, slack.nu, pe, variant);
    return out;
  };

  out.continuous_ell = -std::numeric_limits<double>::infinity();
  out.remaining_budget = budget.eps_qkd - std::exp2(-static_cast<double>(settings.t));
  if (!pe.reason.empty() || !(slack.nu > 0.0)) return finish(0);
  out.remaining_budget -= 2.0 * pe.value;
  if (!(out.remaining_budget > 0.0)) return finish(0);

  const auto n = static_cast<double>(settings.shape.n);
  const double x = std::min(settings.delta + slack.nu, 1.0);
  out.continuous_ell = n * (1.0 - binary_entropy(x)) - static_cast<double>(settings.r + settings.t) +
                       2.0 * std::log2(2.0 * out.remaining_budget);

  const std::int64_t n_bits = settings.shape.n;
  std::int64_t ell = 0;
  if (out.continuous_ell >= 0.0) {
    ell = out.continuous_ell >= static_cast<double>(n_bits)
              ? n_bits
              : static_cast<std::int64_t>(std::floor(out.continuous_ell));
  }
  // The closed form can land one off at integer boundaries; settle it
  // against the condition itself.
  auto ok = [&](std::int64_t candidate) {
    probe.ell = candidate;
    return assemble(probe, budget, slack.nu, pe, variant).feasible;
  };
  while (ell >= 1 && !ok(ell)) --ell;
  while (ell < n_bits && ok(ell + 1)) ++ell;
  return finish(ell);
}

std::int64_t max_ell_at(const ProtocolSettings& settings, const SecurityBudget& budget,
                        const SlackParams& slack, Variant variant) {
  return key_length_at(settings, budget, slack, variant).ell;
}

std::int64_t stream_budget(double eps_stream, double eps_qkd) {
  if (!(eps_stream > 0.0 && eps_stream < 1.0) || !(eps_qkd > 0.0 && eps_qkd < 1.0)) {
    throw std::invalid_argument("stream_budget: both security levels must lie in (0, 1)");
  }
  // Decimal inputs such as 3e-6 / 1e-6 land a hair below the integer.
  const double ratio = eps_stream / eps_qkd;
  return static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-12)));
}

}  // namespace finitekey
