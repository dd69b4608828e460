#include "qflqg/simulator.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qflqg/estimator.hpp"
#include "qflqg/rng.hpp"

namespace qflqg {

namespace {

struct RunSummary {
  double total = 0.0;
  double lqg = 0.0;
  double quant = 0.0;
  double bits = 0.0;
  std::vector<std::size_t> selections;
};

Estimate estimate(const std::vector<double>& values) {
  const std::size_t n = values.size();
  Estimate e;
  e.mean = pairwise_sum(values.data(), n) / static_cast<double>(n);
  if (n < 2) return e;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - e.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  e.std_error = std::sqrt(var / static_cast<double>(n));
  return e;
}

Matrix counts_to_utilization(const std::vector<std::vector<std::size_t>>& selections_per_run,
                             std::size_t num_quantizers) {
  if (selections_per_run.empty()) return Matrix();
  const std::size_t T = selections_per_run.front().size();
  std::vector<std::uint64_t> counts(T * num_quantizers, 0);
  for (const auto& sel : selections_per_run) {
    for (std::size_t t = 0; t < T; ++t) ++counts[t * num_quantizers + sel[t]];
  }
  const auto runs = static_cast<std::uint64_t>(selections_per_run.size());
  Matrix rho(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(num_quantizers));
  std::vector<std::uint64_t> cumulative(num_quantizers, 0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < num_quantizers; ++i) {
      cumulative[i] += counts[t * num_quantizers + i];
      rho(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
          static_cast<double>(cumulative[i]) / static_cast<double>((t + 1) * runs);
    }
  }
  return rho;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

double bit_rate(const QuantizerBank& bank, const std::vector<std::size_t>& selections) {
  if (selections.empty()) return 0.0;
  double bits = 0.0;
  for (std::size_t i : selections) bits += std::log2(static_cast<double>(bank.noise[i].levels()));
  return bits / static_cast<double>(selections.size());
}

SimTrace simulate_run(const Instance& inst, const SelectionPolicy& policy, std::uint64_t seed,
                      std::uint64_t run, const SimOptions& opts) {
  const SystemModel& model = inst.model;
  const int T = model.horizon;
  const std::vector<Matrix>& gains = opts.gains.empty() ? inst.ricc.L : opts.gains;
  if (static_cast<int>(gains.size()) != T) throw ConfigError("simulate: gain sequence length must equal horizon");

  auto draw = [&](int time) {
    CounterRng rng(StreamKey{seed, run, time, StreamTag::kProcessNoise});
    return (time < 0 ? inst.initial_noise : inst.noise).sample(rng);
  };

  SimTrace tr;
  tr.noise.push_back(draw(-1));
  tr.x.push_back(model.init_mean + tr.noise[0]);

  EstimatorState est = initial_estimator(model);
  Vector prev_delta = Vector::Zero(model.n());
  for (int t = 0; t < T; ++t) {
    const Vector& w_prev = tr.noise[static_cast<std::size_t>(t)];
    if (t > 0) est = predict(est, model, tr.u.back());

    const std::size_t theta = policy.select(inst, t, MdpState{prev_delta, w_prev});
    if (theta >= inst.num_quantizers()) throw NumericalError("policy returned invalid quantizer index");
    const Vector w_hat = quantize(inst.bank.at(t, theta), w_prev).centroid;
    est = correct(est, w_hat);
    est.delta = next_delta(model.A, prev_delta, w_prev, w_hat);

    const Vector u = -gains[static_cast<std::size_t>(t)] * est.x_filtered;
    const Vector& x = tr.x.back();
    const double lambda = inst.bank.cost(theta);
    tr.control_cost.push_back(x.dot(model.Q1 * x) + u.dot(model.R * u));
    tr.quantizer_cost.push_back(lambda);

    tr.selections.push_back(theta);
    tr.w_hat.push_back(w_hat);
    tr.x_predicted.push_back(est.x_predicted);
    tr.x_filtered.push_back(est.x_filtered);
    tr.delta.push_back(est.delta);
    tr.u.push_back(u);
    prev_delta = est.delta;

    tr.noise.push_back(draw(t));
    Vector next = model.A * x + model.B * u + tr.noise.back();
    if (!all_finite(next) || !all_finite(u)) {
      throw NumericalError("numerical overflow at t=" + std::to_string(t));
    }
    tr.x.push_back(std::move(next));
  }
  const Vector& xT = tr.x.back();
  tr.control_cost.push_back(xT.dot(model.Q2 * xT));

  tr.lqg_cost = pairwise_sum(tr.control_cost.data(), tr.control_cost.size());
  tr.quant_cost = pairwise_sum(tr.quantizer_cost.data(), tr.quantizer_cost.size());
  tr.total_cost = tr.lqg_cost + tr.quant_cost;
  tr.bit_rate = bit_rate(inst.bank, tr.selections);
  return tr;
}

double audit_cost(const Instance& inst, const SimTrace& trace) {
  const SystemModel& model = inst.model;
  const int T = model.horizon;
  long double j = 0.0L;
  for (int t = 0; t < T; ++t) {
    const Vector& x = trace.x[static_cast<std::size_t>(t)];
    const Vector& u = trace.u[static_cast<std::size_t>(t)];
    j += x.dot(model.Q1 * x) + u.dot(model.R * u) + inst.bank.cost(trace.selections[static_cast<std::size_t>(t)]);
  }
  const Vector& xT = trace.x.back();
  j += xT.dot(model.Q2 * xT);
  return static_cast<double>(j);
}

ExperimentResult monte_carlo(const Instance& inst, const SelectionPolicy& policy,
                             const MonteCarloOptions& opts) {
  if (opts.n_runs < 1) throw ConfigError("monte_carlo: n_runs must be >= 1");
  const std::size_t n = opts.n_runs;
  std::vector<RunSummary> runs(n);
  std::vector<SimTrace> kept(std::min(opts.keep_traces, n));

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_run = n;
  std::string err_msg;
  bool err_numerical = true;

  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n) return;
      try {
        SimTrace tr = simulate_run(inst, policy, opts.seed, r);
        runs[r] = {tr.total_cost, tr.lqg_cost, tr.quant_cost, tr.bit_rate, tr.selections};
        if (r < kept.size()) kept[r] = std::move(tr);
      } catch (const Error& e) {
        std::lock_guard lock(err_mutex);
        if (r < err_run) {
          err_run = r;
          err_msg = e.what();
          err_numerical = dynamic_cast<const ConfigError*>(&e) == nullptr;
        }
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err_run < n) {
    const std::string msg = "run " + std::to_string(err_run) + ": " + err_msg;
    if (err_numerical) throw NumericalError(msg);
    throw ConfigError(msg);
  }

  std::vector<double> total(n), lqg(n), quant(n), bits(n);
  std::vector<std::vector<std::size_t>> selections(n);
  for (std::size_t r = 0; r < n; ++r) {
    total[r] = runs[r].total;
    lqg[r] = runs[r].lqg;
    quant[r] = runs[r].quant;
    bits[r] = runs[r].bits;
    selections[r] = std::move(runs[r].selections);
  }

  ExperimentResult out;
  out.n_runs = n;
  out.total = estimate(total);
  out.lqg = estimate(lqg);
  out.quant = estimate(quant);
  out.bit_rate = pairwise_sum(bits.data(), n) / static_cast<double>(n);
  out.utilization = counts_to_utilization(selections, inst.num_quantizers());
  out.traces = std::move(kept);
  return out;
}

Matrix utilization(const std::vector<SimTrace>& traces, std::size_t num_quantizers) {
  std::vector<std::vector<std::size_t>> selections;
  selections.reserve(traces.size());
  for (const SimTrace& tr : traces) selections.push_back(tr.selections);
  return counts_to_utilization(selections, num_quantizers);
}

Matrix utilization_from_schedule(const std::vector<std::size_t>& selections,
                                 std::size_t num_quantizers) {
  return counts_to_utilization({selections}, num_quantizers);
}

}  // namespace qflqg
