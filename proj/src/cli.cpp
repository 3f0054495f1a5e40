#include "finitekey/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "finitekey/csv.hpp"

namespace finitekey::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::int64_t> m;
  std::string m_range;
  double delta = 0.0451;
  int s = 6;
  std::string variant = "both";
  std::int64_t trials = 100000;
  std::uint64_t seed = 20201015;
  std::optional<double> eps_stream;
  std::optional<double> eps_qkd;
  std::optional<std::int64_t> k;
  std::optional<std::int64_t> w;
  double nu = 0.3;
  std::string output;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void check_delta(double delta) {
  require(delta > 0.0 && delta < 0.5, "--delta must lie in (0, 0.5)");
}

SecurityBudget budget_from(const Options& o) {
  require(o.s >= 1 && o.s <= 300, "--s must lie in [1, 300]");
  return SecurityBudget::from_exponent(o.s);
}

std::vector<Variant> variants_from(const Options& o) {
  try {
    return parse_variants(o.variant);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

MRange range_from(const std::string& text) {
  try {
    return parse_m_range(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_keyrate(const Options& o, std::ostream& out) {
  require(o.m.has_value(), "keyrate needs --m");
  require(*o.m >= 10, "--m must be >= 10");
  check_delta(o.delta);
  const SecurityBudget budget = budget_from(o);
  const auto variants = variants_from(o);
  const std::vector<std::int64_t> ms{*o.m};
  write_keyrate_header(out);
  for (const auto& row : sweep(ms, o.delta, budget, variants)) write_keyrate_row(out, row);
  return kSuccess;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  require(!o.m_range.empty() || o.m.has_value(), "sweep needs --m-range start:stop:step");
  const MRange range = o.m_range.empty() ? MRange{*o.m, *o.m, 1} : range_from(o.m_range);
  require(range.start >= 10, "block lengths must be >= 10");
  check_delta(o.delta);
  const SecurityBudget budget = budget_from(o);
  const auto variants = variants_from(o);
  const auto ms = range.values();
  write_keyrate_header(out);
  for (const auto& row : sweep(ms, o.delta, budget, variants)) write_keyrate_row(out, row);
  return kSuccess;
}

int cmd_minblock(const Options& o, std::ostream& out) {
  const MRange range = range_from(o.m_range.empty() ? "100:20000:50" : o.m_range);
  require(range.start >= 10, "block lengths must be >= 10");
  require(range.start < range.stop, "minblock needs start < stop in --m-range");
  check_delta(o.delta);
  const SecurityBudget budget = budget_from(o);
  write_minblock_header(out);
  for (Variant v : variants_from(o)) {
    const MinBlockResult r = min_block_length(o.delta, budget, v, range.start, range.stop, range.step);
    write_minblock_row(out, r, o.delta, o.s, range);
  }
  return kSuccess;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  require(o.m.has_value() && o.w.has_value(), "simulate needs --m and --w");
  const std::int64_t k = o.k.value_or(*o.m / 2);
  require(k >= 1 && k < *o.m, "--k must satisfy 1 <= k < m");
  require(*o.w >= 0 && *o.w <= *o.m, "--w must lie in [0, m]");
  require(o.delta >= 0.0 && o.delta < 0.5, "--delta must lie in [0, 0.5)");
  require(o.nu > 0.0, "--nu must be positive");
  require(o.trials >= 1, "--trials must be >= 1");
  const SimConfig config{BlockShape::make(*o.m, k), *o.w, o.delta, o.nu, o.trials, o.seed};
  write_simulate_header(out);
  write_simulate_row(out, config, simulate(config));
  return kSuccess;
}

int cmd_validate(const Options& o, std::ostream& out) {
  require(o.trials >= 1, "--trials must be >= 1");
  const auto grid = default_validation_grid(o.trials, o.seed);
  return validate_to_csv(grid, default_bounds(), out);
}

int cmd_stream(const Options& o, std::ostream& out) {
  require(o.eps_stream.has_value(), "stream needs --eps-stream");
  const double eps_qkd = o.eps_qkd.value_or(std::pow(10.0, -o.s));
  require(*o.eps_stream > 0.0 && *o.eps_stream < 1.0, "--eps-stream must lie in (0, 1)");
  require(eps_qkd > 0.0 && eps_qkd < 1.0, "--eps-qkd must lie in (0, 1)");
  out << stream_budget(*o.eps_stream, eps_qkd) << '\n';
  return kSuccess;
}

}  // namespace

std::vector<std::int64_t> MRange::values() const {
  std::vector<std::int64_t> out;
  for (std::int64_t m = start; m <= stop; m += step) out.push_back(m);
  return out;
}

MRange parse_m_range(const std::string& text) {
  MRange r;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.start >> c1 >> r.stop >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof()) {
    throw std::invalid_argument("--m-range expects start:stop:step, got '" + text + "'");
  }
  if (r.step < 1 || r.stop < r.start) {
    throw std::invalid_argument("--m-range needs step >= 1 and stop >= start");
  }
  return r;
}

std::vector<Variant> parse_variants(const std::string& text) {
  if (text == "both") return {Variant::lemma2, Variant::serfling};
  if (auto v = parse_variant(text)) return {*v};
  throw std::invalid_argument("--variant must be serfling, lemma2 or both");
}

void write_keyrate_header(std::ostream& out) {
  csv::write_row(out, {"m", "variant", "ell", "alpha", "beta", "nu", "xi", "eps_correct", "eps_pe",
                       "eps_pa", "eps_total", "feasible"});
}

void write_keyrate_row(std::ostream& out, const KeyRateResult& r) {
  csv::write_row(out, {std::to_string(r.m), std::string(to_string(r.variant)), std::to_string(r.ell),
                       csv::exact(r.point.alpha), csv::exact(r.point.beta), csv::exact(r.point.nu),
                       csv::exact(r.point.xi), csv::sig6(r.breakdown.eps_correct),
                       csv::sig6(r.breakdown.eps_pe), csv::sig6(r.breakdown.eps_pa),
                       csv::sig6(r.breakdown.total), csv::boolean(r.feasible)});
}

void write_minblock_header(std::ostream& out) {
  csv::write_row(out, {"delta", "s", "variant", "m_lo", "m_hi", "stride", "m_min", "found"});
}

void write_minblock_row(std::ostream& out, const MinBlockResult& r, double delta, int s,
                        const MRange& range) {
  csv::write_row(out, {csv::exact(delta), std::to_string(s), std::string(to_string(r.variant)),
                       std::to_string(range.start), std::to_string(range.stop),
                       std::to_string(range.step), r.m_min ? std::to_string(*r.m_min) : "",
                       csv::boolean(r.m_min.has_value())});
}

void write_simulate_header(std::ostream& out) {
  csv::write_row(out, {"m", "k", "w", "delta", "nu", "trials", "seed", "bad_events", "frequency",
                       "ci_low", "ci_high", "exact"});
}

void write_simulate_row(std::ostream& out, const SimConfig& c, const SimReport& r) {
  csv::write_row(out, {std::to_string(c.shape.m), std::to_string(c.shape.k), std::to_string(c.w),
                       csv::exact(c.delta), csv::exact(c.nu), std::to_string(c.trials),
                       std::to_string(c.seed), std::to_string(r.bad_event_count),
                       csv::sig6(r.frequency), csv::sig6(r.ci_low), csv::sig6(r.ci_high),
                       csv::sig6(r.exact)});
}

int validate_to_csv(std::span<const ValidationEntry> grid, const BoundSet& bounds,
                    std::ostream& out) {
  csv::write_row(out, {"m", "k", "w", "delta", "nu", "xi", "trials", "seed", "bad_events",
                       "frequency", "ci_low", "ci_high", "exact", "serfling_bound",
                       "lemma2_bound", "frequency_within_bounds", "pass", "error"});
  bool all_pass = true;
  for (const ValidationRow& row : validate_bounds(grid, bounds)) {
    const SimConfig& c = row.entry.config;
    const SimReport& r = row.report;
    all_pass = all_pass && row.pass;
    csv::write_row(out, {std::to_string(c.shape.m), std::to_string(c.shape.k), std::to_string(c.w),
                         csv::exact(c.delta), csv::exact(c.nu), csv::exact(row.entry.xi),
                         std::to_string(c.trials), std::to_string(c.seed),
                         std::to_string(r.bad_event_count), csv::sig6(r.frequency),
                         csv::sig6(r.ci_low), csv::sig6(r.ci_high), csv::sig6(r.exact),
                         csv::sig6(row.serfling_bound), csv::sig6(row.lemma2_bound),
                         csv::boolean(row.frequency_within_bounds), csv::boolean(row.pass),
                         row.error});
  }
  return all_pass ? kSuccess : kValidationFailed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Finite-key security calculator for entanglement-based QKD", "fkcalc"};
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.require_subcommand(1, 1);

  app.add_option("--m", o.m, "Block length");
  app.add_option("--m-range", o.m_range, "Block lengths as start:stop:step");
  app.add_option("--delta", o.delta, "Tolerated error rate as a fraction")->capture_default_str();
  app.add_option("--s", o.s, "Security exponent, eps_qkd = 10^-s")->capture_default_str();
  app.add_option("--variant", o.variant, "serfling, lemma2 or both")->capture_default_str();
  app.add_option("--trials", o.trials, "Monte Carlo trials per row")->capture_default_str();
  app.add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--eps-stream", o.eps_stream, "Target security of the key stream");
  app.add_option("--eps-qkd", o.eps_qkd, "Per-run security parameter (default 10^-s)");
  app.add_option("--k", o.k, "PE sample size for simulate (default m/2)");
  app.add_option("--w", o.w, "Error weight for simulate");
  app.add_option("--nu", o.nu, "Deviation for simulate")->capture_default_str();
  app.add_option("--output", o.output, "Write CSV here instead of standard output");

  struct Command {
    const char* name;
    const char* help;
    int (*body)(const Options&, std::ostream&);
  };
  const Command commands[] = {
      {"keyrate", "Optimized key length at one block length", cmd_keyrate},
      {"sweep", "Optimized key rate over a block-length range", cmd_sweep},
      {"minblock", "Smallest block length with a positive key", cmd_minblock},
      {"validate", "Check the bounds against the exact oracle and simulation", cmd_validate},
      {"simulate", "Monte Carlo estimate of the PE bad event", cmd_simulate},
      {"stream", "Number of runs a key-stream security target allows", cmd_stream},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) subs.push_back(app.add_subcommand(c.name, c.help)->fallthrough());

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsageError;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      if (o.output.empty()) return commands[i].body(o, out);
      // Build the whole table first so a usage error leaves no partial file.
      std::ostringstream buffer;
      const int code = commands[i].body(o, buffer);
      std::ofstream file(o.output, std::ios::binary);
      if (!file) throw UsageError("cannot open --output " + o.output);
      file << buffer.str();
      return code;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace finitekey::cli
