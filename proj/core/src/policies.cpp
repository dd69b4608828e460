#include "qflqg/policies.hpp"

#include <stdexcept>

#include "qflqg/estimator.hpp"
#include "qflqg/oracle.hpp"
#include "qflqg/rng.hpp"

namespace qflqg {

namespace {

double weighted_square(const Matrix& N, const Vector& x) { return x.dot(N * x); }

void check_step(const Instance& inst, int k) {
  if (k < 0 || k >= inst.horizon()) {
    throw ConfigError("decision time " + std::to_string(k) + " outside [0, " +
                      std::to_string(inst.horizon()) + ")");
  }
}

}  // namespace

OfflineSchedule offline_schedule(const Instance& inst, double lambda_scale) {
  const int T = inst.horizon();
  const std::size_t M = inst.num_quantizers();
  OfflineSchedule out;
  out.selections.resize(static_cast<std::size_t>(T));
  out.scores.resize(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) {
    const Matrix& cov = k == 0 ? inst.model.init_cov : inst.model.noise_cov;
    const Matrix& omega = inst.ricc.Omega[static_cast<std::size_t>(k)];
    std::vector<double>& row = out.scores[static_cast<std::size_t>(k)];
    row.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
      row[i] = (omega * (cov - inst.bank.at(k, i).F)).trace() + lambda_scale * inst.bank.cost(i);
    }
    out.selections[static_cast<std::size_t>(k)] = argmin_lowest(row);
  }
  return out;
}

Vector MdpState::stacked() const {
  Vector s(delta.size() + w.size());
  s << delta, w;
  return s;
}

MdpState MdpState::from_stacked(const Vector& s) {
  const Eigen::Index n = s.size() / 2;
  return {s.head(n), s.tail(n)};
}

std::size_t argmin_lowest(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

Vector centroid_for(const Instance& inst, int k, std::size_t i, const Vector& w) {
  return quantize(inst.bank.at(k, i), w).centroid;
}

Matrix terminal_phi(const Instance& inst) {
  const Eigen::Index n = inst.model.n();
  const Matrix& N = inst.ricc.N.back();
  Matrix H = Matrix::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = inst.model.A;
  H.topRightCorner(n, n) = Matrix::Identity(n, n);
  Matrix Nt = Matrix::Zero(2 * n, 2 * n);
  Nt.topLeftCorner(n, n) = N;
  return symmetrize(H.transpose() * Nt * H);
}

TerminalStage terminal_stage_policy(const Instance& inst, const MdpState& s) {
  const int k = inst.horizon() - 1;
  const Eigen::Index n = inst.model.n();
  const Matrix& N = inst.ricc.N.back();
  const Vector sv = s.stacked();

  Matrix H = Matrix::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = inst.model.A;
  H.topRightCorner(n, n) = Matrix::Identity(n, n);
  Matrix Nt = Matrix::Zero(2 * n, 2 * n);
  Nt.topLeftCorner(n, n) = N;
  const Matrix HtN = H.transpose() * Nt;

  TerminalStage out;
  out.quadratic = sv.dot(terminal_phi(inst) * sv);
  out.psi.resize(inst.num_quantizers());
  for (std::size_t i = 0; i < inst.num_quantizers(); ++i) {
    const Vector w_hat = centroid_for(inst, k, i, s.w);
    Vector lifted = Vector::Zero(2 * n);
    lifted.head(n) = w_hat;
    out.psi[i] = -2.0 * sv.dot(HtN * lifted) + weighted_square(N, w_hat) + inst.bank.cost(i);
  }
  out.index = argmin_lowest(out.psi);
  out.value = out.quadratic + out.psi[out.index];
  return out;
}

std::vector<double> greedy_scores(const Instance& inst, int k, const MdpState& s) {
  check_step(inst, k);
  const Matrix& N = inst.ricc.N[static_cast<std::size_t>(k)];
  std::vector<double> scores(inst.num_quantizers());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const Vector d = next_delta(inst.model.A, s.delta, s.w, centroid_for(inst, k, i, s.w));
    scores[i] = weighted_square(N, d) + inst.bank.cost(i);
  }
  return scores;
}

std::size_t greedy_policy(const Instance& inst, int k, const MdpState& s) {
  return argmin_lowest(greedy_scores(inst, k, s));
}

std::vector<double> rollout_scores(const Instance& inst, int k, const MdpState& s,
                                   const OfflineSchedule& base, const RolloutOptions& opts) {
  check_step(inst, k);
  if (opts.n_samples < 1) throw ConfigError("rollout: n_samples must be >= 1");
  const int T = inst.horizon();
  if (static_cast<int>(base.selections.size()) != T) {
    throw ConfigError("rollout: base schedule length does not match horizon");
  }
  const Matrix& A = inst.model.A;
  const std::size_t M = inst.num_quantizers();
  const auto future = static_cast<std::size_t>(T - 1 - k);

  std::vector<Vector> start(M);
  std::vector<double> stage(M);
  for (std::size_t i = 0; i < M; ++i) {
    start[i] = next_delta(A, s.delta, s.w, centroid_for(inst, k, i, s.w));
    stage[i] = weighted_square(inst.ricc.N[static_cast<std::size_t>(k)], start[i]) + inst.bank.cost(i);
  }
  if (future == 0) return stage;

  std::vector<double> to_go(M, 0.0);
  std::vector<Vector> draws(future);
  for (int j = 0; j < opts.n_samples; ++j) {
    CounterRng rng(StreamKey{opts.seed, static_cast<std::uint64_t>(j), k, StreamTag::kRollout});
    for (std::size_t f = 0; f < future; ++f) draws[f] = inst.noise.sample(rng);
    for (std::size_t i = 0; i < M; ++i) {
      Vector d = start[i];
      double c = 0.0;
      for (int t = k + 1; t < T; ++t) {
        const std::size_t b = base.selections[static_cast<std::size_t>(t)];
        const Vector& w = draws[static_cast<std::size_t>(t - k - 1)];
        d = next_delta(A, d, w, centroid_for(inst, t, b, w));
        c += weighted_square(inst.ricc.N[static_cast<std::size_t>(t)], d) + inst.bank.cost(b);
      }
      to_go[i] += c;
    }
  }
  for (std::size_t i = 0; i < M; ++i) stage[i] += to_go[i] / static_cast<double>(opts.n_samples);
  return stage;
}

std::size_t rollout_policy(const Instance& inst, int k, const MdpState& s,
                           const OfflineSchedule& base, const RolloutOptions& opts) {
  return argmin_lowest(rollout_scores(inst, k, s, base, opts));
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOffline: return "offline";
    case PolicyKind::kGreedy: return "greedy";
    case PolicyKind::kRollout: return "rollout";
    case PolicyKind::kOracle: return "oracle";
    case PolicyKind::kTerminalExact: return "terminal_exact";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "offline") return PolicyKind::kOffline;
  if (name == "greedy") return PolicyKind::kGreedy;
  if (name == "rollout") return PolicyKind::kRollout;
  if (name == "oracle") return PolicyKind::kOracle;
  if (name == "terminal_exact") return PolicyKind::kTerminalExact;
  throw ConfigError("unknown policy '" + name + "' (expected offline|greedy|rollout|oracle)");
}

SelectionPolicy SelectionPolicy::offline(OfflineSchedule schedule) {
  SelectionPolicy p;
  p.kind_ = PolicyKind::kOffline;
  p.schedule_ = std::move(schedule);
  return p;
}

SelectionPolicy SelectionPolicy::greedy() {
  SelectionPolicy p;
  p.kind_ = PolicyKind::kGreedy;
  return p;
}

SelectionPolicy SelectionPolicy::rollout(OfflineSchedule base, RolloutOptions opts) {
  if (opts.n_samples < 1) throw ConfigError("rollout: n_samples must be >= 1");
  SelectionPolicy p;
  p.kind_ = PolicyKind::kRollout;
  p.schedule_ = std::move(base);
  p.rollout_ = opts;
  return p;
}

SelectionPolicy SelectionPolicy::oracle(const Instance& inst) {
  SelectionPolicy p;
  p.kind_ = PolicyKind::kOracle;
  p.oracle_ = std::make_shared<const OracleTable>(inst);
  return p;
}

SelectionPolicy SelectionPolicy::terminal_exact() {
  SelectionPolicy p;
  p.kind_ = PolicyKind::kTerminalExact;
  return p;
}

std::size_t SelectionPolicy::select(const Instance& inst, int k, const MdpState& s) const {
  switch (kind_) {
    case PolicyKind::kOffline:
      return schedule_.selections.at(static_cast<std::size_t>(k));
    case PolicyKind::kGreedy:
      return greedy_policy(inst, k, s);
    case PolicyKind::kRollout:
      return rollout_policy(inst, k, s, schedule_, rollout_);
    case PolicyKind::kOracle:
      return oracle_->select(inst, k, s);
    case PolicyKind::kTerminalExact:
      return k == inst.horizon() - 1 ? terminal_stage_policy(inst, s).index
                                     : greedy_policy(inst, k, s);
  }
  throw std::logic_error("unhandled policy kind");
}

}  // namespace qflqg
