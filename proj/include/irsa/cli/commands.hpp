#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "irsa/alternating.hpp"
#include "irsa/scenario.hpp"

namespace irsa::cli {

enum ExitCode { kOk = 0, kUsage = 1, kInfeasible = 2, kMissingArtifact = 3 };

struct Options {
  std::string config_path;  // empty: built-in defaults
  std::uint64_t seed = 1;
  std::string out = "out";
  std::vector<double> pt_dbm;  // empty: command default
  std::size_t realizations = 100;
  std::vector<CaseId> cases;  // empty: all
  std::optional<std::size_t> tiles_override;
  std::optional<double> blockage_db;
  std::optional<std::size_t> samples;
  std::optional<std::vector<std::size_t>> hidden;
  std::optional<bool> repair_quotas;
};

// Config file (or defaults) with command-line overrides applied.
ScenarioConfig resolve_config(const Options& opts);

// Per-P_t alternating-optimizer traces next to the direct-only baseline. Without
// --tiles-override a single tile is used.
void cmd_convergence(const Options& opts, std::ostream& log);

// Monte-Carlo sum rates per case and transmit power.
void cmd_compare(const Options& opts, std::ostream& log);

// sub is one of gen, train, eval, bench; all read and write inside opts.out.
void cmd_ml(const std::string& sub, const Options& opts, std::ostream& log);

// Parses argv, dispatches, and maps failures onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace irsa::cli
