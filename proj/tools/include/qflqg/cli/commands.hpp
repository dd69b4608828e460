#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "qflqg/cli/config.hpp"

namespace qflqg::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitOracleSize = 3,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<PolicyKind> policy;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

/// Worker count from QFLQG_THREADS, or the hardware concurrency when unset.
unsigned threads_from_env();

/// riccati.csv, schedule.csv
void cmd_solve(const ExperimentConfig& cfg, const std::filesystem::path& out);
/// summary.json, utilization.csv, traces.csv (when run.keep_traces > 0)
void cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out, unsigned threads);
/// pareto.csv
void cmd_pareto(const ExperimentConfig& cfg, const std::filesystem::path& out, unsigned threads);
/// oracle.json
void cmd_oracle(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Full command line handling; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace qflqg::cli
