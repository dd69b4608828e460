#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qflqg/instance.hpp"

namespace qflqg {

/// Quantizer choice per decision time for the quantized-measurement pattern.
struct OfflineSchedule {
  std::vector<std::size_t> selections;
  /// scores[k][i] = tr(Omega_k (Cov - F^i)) + scale * lambda_i
  std::vector<std::vector<double>> scores;
};

/// argmin_i tr(Omega_k (Cov_k - F^i_k)) + lambda_scale * lambda_i for every k,
/// lowest index on ties.  Cov_0 = init_cov with the initial bank; Cov_k =
/// noise_cov otherwise.
OfflineSchedule offline_schedule(const Instance& inst, double lambda_scale = 1.0);

/// Lifted MDP state S_t = [Delta_{t-1}; W_{t-1}].
struct MdpState {
  Vector delta;
  Vector w;

  Vector stacked() const;
  static MdpState from_stacked(const Vector& s);
};

/// Minimizer over a score vector with lowest-index tie breaking.
std::size_t argmin_lowest(const std::vector<double>& scores);

/// Exact last-stage solution C_{T-1}(s) = sᵀ Phi s + min_i psi^i(s),
/// Phi = Hᵀ Ñ H, H = [[A, I], [0, 0]], Ñ = blockdiag(N_{T-1}, 0), and
/// psi^i(s) = -2 sᵀ Hᵀ Ñ [ŵ^i; 0] + ŵ^iᵀ N_{T-1} ŵ^i + lambda_i.
struct TerminalStage {
  std::size_t index = 0;
  double value = 0.0;
  double quadratic = 0.0;
  std::vector<double> psi;
};

Matrix terminal_phi(const Instance& inst);
TerminalStage terminal_stage_policy(const Instance& inst, const MdpState& s);

/// Centroid of W_{k-1} under quantizer i (initial bank at k = 0).
Vector centroid_for(const Instance& inst, int k, std::size_t i, const Vector& w);

/// Single-stage scores ||A Delta + W - ŵ^i||²_{N_k} + lambda_i.
std::vector<double> greedy_scores(const Instance& inst, int k, const MdpState& s);
std::size_t greedy_policy(const Instance& inst, int k, const MdpState& s);

/// Monte Carlo one-step lookahead with `base` played from k+1 on.  Future
/// noise is drawn from streams keyed by (seed, sample, k) and shared by all
/// actions, so the result is a deterministic function of (k, s, seed).
struct RolloutOptions {
  int n_samples = 256;
  std::uint64_t seed = 0;
};
std::vector<double> rollout_scores(const Instance& inst, int k, const MdpState& s,
                                   const OfflineSchedule& base, const RolloutOptions& opts);
std::size_t rollout_policy(const Instance& inst, int k, const MdpState& s,
                           const OfflineSchedule& base, const RolloutOptions& opts);

class OracleTable;

enum class PolicyKind { kOffline, kGreedy, kRollout, kOracle, kTerminalExact };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);

/// Quantizer-selection rule used by the simulator.  Offline policies read only
/// k; the others read the lifted state.  Immutable after construction.
class SelectionPolicy {
 public:
  static SelectionPolicy offline(OfflineSchedule schedule);
  static SelectionPolicy greedy();
  static SelectionPolicy rollout(OfflineSchedule base, RolloutOptions opts);
  /// Exact scenario-tree policy; requires a discrete instance within oracle
  /// limits.
  static SelectionPolicy oracle(const Instance& inst);
  /// Exact at k = T-1, greedy before.
  static SelectionPolicy terminal_exact();

  PolicyKind kind() const { return kind_; }
  bool uses_state() const { return kind_ != PolicyKind::kOffline; }
  const OfflineSchedule& schedule() const { return schedule_; }

  std::size_t select(const Instance& inst, int k, const MdpState& s) const;

 private:
  PolicyKind kind_ = PolicyKind::kOffline;
  OfflineSchedule schedule_;
  RolloutOptions rollout_;
  std::shared_ptr<const OracleTable> oracle_;
};

}  // namespace qflqg
