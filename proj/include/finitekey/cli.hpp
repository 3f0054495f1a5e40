#pragma once

// Command-line front end. Everything here writes CSV to a stream so the
// commands can be driven in-process by tests.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "finitekey/optimizer.hpp"
#include "finitekey/simulator.hpp"

namespace finitekey::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailed = 1,
  kUsageError = 2,
};

struct MRange {
  std::int64_t start = 0;
  std::int64_t stop = 0;
  std::int64_t step = 1;

  [[nodiscard]] std::vector<std::int64_t> values() const;
};

/// Parses "start:stop:step". Throws std::invalid_argument.
MRange parse_m_range(const std::string& text);

/// "serfling", "lemma2" or "both" (lemma2 then serfling).
std::vector<Variant> parse_variants(const std::string& text);

void write_keyrate_header(std::ostream& out);
void write_keyrate_row(std::ostream& out, const KeyRateResult& row);

void write_minblock_header(std::ostream& out);
void write_minblock_row(std::ostream& out, const MinBlockResult& row, double delta, int s,
                        const MRange& range);

void write_simulate_header(std::ostream& out);
void write_simulate_row(std::ostream& out, const SimConfig& config, const SimReport& report);

/// Runs validate_bounds over `grid` and writes the table. Returns
/// kValidationFailed if any row fails, kSuccess otherwise.
int validate_to_csv(std::span<const ValidationEntry> grid, const BoundSet& bounds,
                    std::ostream& out);

/// Full command line without the program name. Errors and usage go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finitekey::cli
