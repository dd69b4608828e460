#include "qflqg/oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "qflqg/estimator.hpp"
#include "qflqg/rng.hpp"

namespace qflqg {

namespace {

double weighted_square(const Matrix& N, const Vector& x) { return x.dot(N * x); }

const DiscreteDistribution& support_at(const Instance& inst, int t) {
  return t < 0 ? inst.initial_noise.support() : inst.noise.support();
}

// Selection cost of stage k for action i, and the resulting Delta_k.
double stage(const Instance& inst, int k, std::size_t i, const MdpState& s, Vector& delta) {
  delta = next_delta(inst.model.A, s.delta, s.w, centroid_for(inst, k, i, s.w));
  return weighted_square(inst.ricc.N[static_cast<std::size_t>(k)], delta) + inst.bank.cost(i);
}

double optimal_value(const Instance& inst, int k, const MdpState& s);

double q_value(const Instance& inst, int k, std::size_t i, const MdpState& s) {
  Vector delta;
  double q = stage(inst, k, i, s, delta);
  if (k + 1 < inst.horizon()) {
    const DiscreteDistribution& next = support_at(inst, k);
    for (std::size_t j = 0; j < next.size(); ++j) {
      q += next.weights[j] * optimal_value(inst, k + 1, MdpState{delta, next.points[j]});
    }
  }
  return q;
}

double optimal_value(const Instance& inst, int k, const MdpState& s) {
  double best = q_value(inst, k, 0, s);
  for (std::size_t i = 1; i < inst.num_quantizers(); ++i) best = std::min(best, q_value(inst, k, i, s));
  return best;
}

struct PolicyAccumulator {
  double selection = 0.0;
  double quantizer = 0.0;
};

void evaluate(const Instance& inst, const SelectionPolicy& policy, int k, const MdpState& s,
              double prob, PolicyAccumulator& acc) {
  const std::size_t i = policy.select(inst, k, s);
  Vector delta;
  acc.selection += prob * stage(inst, k, i, s, delta);
  acc.quantizer += prob * inst.bank.cost(i);
  if (k + 1 >= inst.horizon()) return;
  const DiscreteDistribution& next = support_at(inst, k);
  for (std::size_t j = 0; j < next.size(); ++j) {
    evaluate(inst, policy, k + 1, MdpState{delta, next.points[j]}, prob * next.weights[j], acc);
  }
}

}  // namespace

double oracle_tree_size(const Instance& inst) {
  const auto M = static_cast<double>(inst.num_quantizers());
  const double K0 = inst.initial_noise.is_discrete() ? static_cast<double>(inst.initial_noise.support().size()) : INFINITY;
  const double K = inst.noise.is_discrete() ? static_cast<double>(inst.noise.support().size()) : INFINITY;
  double total = 0.0;
  double layer = 1.0;
  for (int k = 0; k < inst.horizon(); ++k) {
    total += layer;
    layer *= M * K;
  }
  return K0 * total;
}

void check_oracle_limits(const Instance& inst) {
  if (!inst.is_discrete() || !inst.initial_noise.is_discrete()) {
    throw ConfigError("oracle: requires a discretized instance");
  }
  const double nodes = oracle_tree_size(inst);
  std::ostringstream why;
  if (inst.horizon() > kOracleMaxHorizon) why << "horizon " << inst.horizon() << " > " << kOracleMaxHorizon;
  else if (inst.noise.support().size() > kOracleMaxSupport || inst.initial_noise.support().size() > kOracleMaxSupport)
    why << "noise support " << inst.noise.support().size() << " > " << kOracleMaxSupport;
  else if (inst.model.n() > kOracleMaxDim) why << "state dimension " << inst.model.n() << " > " << kOracleMaxDim;
  else if (nodes > kOracleMaxNodes) why << "limit " << kOracleMaxNodes;
  if (!why.str().empty()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "instance too large for oracle: tree size " << nodes << " decision nodes (" << why.str() << ")";
    throw OracleSizeError(msg.str());
  }
}

OracleDecision oracle_cost_to_go(const Instance& inst, int k, const MdpState& s) {
  OracleDecision out;
  out.q.resize(inst.num_quantizers());
  for (std::size_t i = 0; i < out.q.size(); ++i) out.q[i] = q_value(inst, k, i, s);
  out.index = argmin_lowest(out.q);
  out.value = out.q[out.index];
  return out;
}

OracleResult brute_force_mdp(const Instance& inst) {
  check_oracle_limits(inst);
  OracleResult out;
  out.tree_nodes = oracle_tree_size(inst);
  const DiscreteDistribution& init = support_at(inst, -1);
  const Vector zero = Vector::Zero(inst.model.n());
  for (std::size_t j = 0; j < init.size(); ++j) {
    OracleDecision d = oracle_cost_to_go(inst, 0, MdpState{zero, init.points[j]});
    out.value += init.weights[j] * d.value;
    out.first_stage.push_back({init.points[j], init.weights[j], d.index, d.value, std::move(d.q)});
  }
  return out;
}

PolicyValue evaluate_policy_exact(const Instance& inst, const SelectionPolicy& policy) {
  check_oracle_limits(inst);
  PolicyAccumulator acc;
  const DiscreteDistribution& init = support_at(inst, -1);
  const Vector zero = Vector::Zero(inst.model.n());
  for (std::size_t j = 0; j < init.size(); ++j) {
    evaluate(inst, policy, 0, MdpState{zero, init.points[j]}, init.weights[j], acc);
  }
  return {acc.selection, acc.quantizer};
}

std::vector<double> sample_policy_costs(const Instance& inst, const SelectionPolicy& policy,
                                        std::size_t n_paths, std::uint64_t seed) {
  std::vector<double> costs(n_paths, 0.0);
  for (std::size_t p = 0; p < n_paths; ++p) {
    MdpState s{Vector::Zero(inst.model.n()), Vector()};
    for (int k = 0; k < inst.horizon(); ++k) {
      CounterRng rng(StreamKey{seed, p, k - 1, StreamTag::kOracle});
      s.w = (k == 0 ? inst.initial_noise : inst.noise).sample(rng);
      const std::size_t i = policy.select(inst, k, s);
      Vector delta;
      costs[p] += stage(inst, k, i, s, delta);
      s.delta = std::move(delta);
    }
  }
  return costs;
}

OracleTable::OracleTable(const Instance& inst) {
  check_oracle_limits(inst);
  const DiscreteDistribution& init = support_at(inst, -1);
  const Vector zero = Vector::Zero(inst.model.n());
  for (std::size_t j = 0; j < init.size(); ++j) fill(inst, 0, MdpState{zero, init.points[j]});
}

OracleTable::Key OracleTable::make_key(int k, const MdpState& s) {
  Key key;
  key.reserve(static_cast<std::size_t>(1 + s.delta.size() + s.w.size()));
  key.push_back(static_cast<std::uint64_t>(k));
  for (Eigen::Index i = 0; i < s.delta.size(); ++i) key.push_back(std::bit_cast<std::uint64_t>(s.delta(i)));
  for (Eigen::Index i = 0; i < s.w.size(); ++i) key.push_back(std::bit_cast<std::uint64_t>(s.w(i)));
  return key;
}

void OracleTable::fill(const Instance& inst, int k, const MdpState& s) {
  const OracleDecision d = oracle_cost_to_go(inst, k, s);
  if (!table_.emplace(make_key(k, s), d.index).second) return;
  if (k + 1 >= inst.horizon()) return;
  const Vector delta = next_delta(inst.model.A, s.delta, s.w, centroid_for(inst, k, d.index, s.w));
  const DiscreteDistribution& next = support_at(inst, k);
  for (std::size_t j = 0; j < next.size(); ++j) fill(inst, k + 1, MdpState{delta, next.points[j]});
}

std::size_t OracleTable::select(const Instance& inst, int k, const MdpState& s) const {
  if (auto it = table_.find(make_key(k, s)); it != table_.end()) return it->second;
  return oracle_cost_to_go(inst, k, s).index;
}

}  // namespace qflqg
