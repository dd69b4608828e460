#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qflqg/policies.hpp"
#include "qflqg/quantizer.hpp"
#include "qflqg/system_model.hpp"

namespace qflqg::cli {

struct QuantizerConfig {
  std::string name;
  /// Either per-axis breakpoints or explicit cells.
  std::vector<std::vector<double>> breakpoints;
  std::vector<Cell> cells;
  double cost = 0.0;
  std::vector<Vector> representatives;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kOffline;
  int n_samples = 256;
  /// Sigma points per axis for the discretized oracle instance (3 or 5).
  int oracle_points = 3;
};

struct RunConfig {
  std::size_t n_runs = 10000;
  std::uint64_t seed = 0;
  std::vector<double> betas;
  std::size_t keep_traces = 0;
};

struct ExperimentConfig {
  SystemModel model;
  bool include_open_loop = false;
  std::vector<QuantizerConfig> quantizers;
  PolicyConfig policy;
  RunConfig run;
  std::string output_dir = "out";

  BankSpec bank_spec() const;
};

/// Parses and validates a YAML (or JSON) config.  Errors are ConfigError
/// with "<file>:<line>:<column>: <field path>: <reason>".
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source_name);

/// Fully resolved config; feeding it back to parse_config reproduces the
/// same config.  The output block is omitted when `with_output` is false.
nlohmann::json resolved_json(const ExperimentConfig& cfg, bool with_output = true);

/// FNV-1a 64 over the resolved config without its output block, as 16 hex
/// digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace qflqg::cli
