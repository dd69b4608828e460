#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qflqg/instance.hpp"
#include "qflqg/policies.hpp"

namespace qflqg {

/// Limits of the exact solver.
inline constexpr int kOracleMaxHorizon = 5;
inline constexpr std::size_t kOracleMaxSupport = 9;
inline constexpr Eigen::Index kOracleMaxDim = 2;
inline constexpr double kOracleMaxNodes = 1e6;

/// Decision nodes of the scenario tree: K0 * sum_{k<T} (M K)^k.
double oracle_tree_size(const Instance& inst);

/// Throws OracleSizeError("instance too large for oracle ...") or ConfigError
/// (Gaussian instance) when the exact solver cannot run.
void check_oracle_limits(const Instance& inst);

/// Q-values and optimal action at one state, with the exact expectation over
/// the remaining discrete noise.  Values count the selection cost
/// sum_{t>=k} Delta_tᵀ N_t Delta_t + lambda_{theta_t}.
struct OracleDecision {
  std::size_t index = 0;
  double value = 0.0;
  std::vector<double> q;
};
OracleDecision oracle_cost_to_go(const Instance& inst, int k, const MdpState& s);

struct OracleFirstStage {
  Vector w;
  double prob = 0.0;
  std::size_t index = 0;
  double value = 0.0;
  std::vector<double> q;
};

struct OracleResult {
  /// Optimal expected selection cost E[C_0].
  double value = 0.0;
  /// One entry per support point of W_{-1}.
  std::vector<OracleFirstStage> first_stage;
  double tree_nodes = 0.0;
};

/// Backward induction over the full scenario tree of a discrete instance.
OracleResult brute_force_mdp(const Instance& inst);

/// Exact expected selection cost and expected quantizer cost of `policy` on a
/// discrete instance, enumerating every scenario the policy can reach.
struct PolicyValue {
  double selection_cost = 0.0;
  double quantizer_cost = 0.0;
};
PolicyValue evaluate_policy_exact(const Instance& inst, const SelectionPolicy& policy);

/// Selection cost of `policy` on `n_paths` sampled scenarios.  Path j uses the
/// streams keyed by (seed, j, t, oracle tag), so different policies evaluated
/// with the same seed see the same noise.
std::vector<double> sample_policy_costs(const Instance& inst, const SelectionPolicy& policy,
                                        std::size_t n_paths, std::uint64_t seed);

/// Optimal actions precomputed on every node the optimal policy reaches.
/// States outside the table are solved on demand.
class OracleTable {
 public:
  explicit OracleTable(const Instance& inst);

  std::size_t select(const Instance& inst, int k, const MdpState& s) const;
  std::size_t size() const { return table_.size(); }

 private:
  using Key = std::vector<std::uint64_t>;
  static Key make_key(int k, const MdpState& s);
  void fill(const Instance& inst, int k, const MdpState& s);

  std::map<Key, std::size_t> table_;
};

}  // namespace qflqg
