#pragma once

#include <cstdint>
#include <vector>

#include "qflqg/instance.hpp"
#include "qflqg/policies.hpp"

namespace qflqg {

/// One closed-loop run.  Index t of the per-step vectors is decision time t;
/// `noise[t]` is W_{t-1}, so noise[0] = W_{-1} = X_0 - mu_0.
struct SimTrace {
  std::vector<Vector> x;            // X_0 .. X_T
  std::vector<Vector> u;            // U_0 .. U_{T-1}
  std::vector<Vector> noise;        // W_{-1} .. W_{T-1}
  std::vector<std::size_t> selections;
  std::vector<Vector> w_hat;        // ŵ_{t-1} delivered at t
  std::vector<Vector> x_predicted;  // X̂_t
  std::vector<Vector> x_filtered;   // X̃_t
  std::vector<Vector> delta;        // Delta_t = X_t - X̃_t
  std::vector<double> control_cost; // X_tᵀQ1X_t + U_tᵀRU_t, then X_TᵀQ2X_T
  std::vector<double> quantizer_cost;
  double lqg_cost = 0.0;
  double quant_cost = 0.0;
  double total_cost = 0.0;
  double bit_rate = 0.0;
};

struct SimOptions {
  /// Replacement feedback gains (length T); empty uses the Riccati gains.
  std::vector<Matrix> gains;
};

/// Runs the loop: realize W_{t-1}, select theta_t from [Delta_{t-1}; W_{t-1}],
/// quantize with the selected quantizer (initial bank at t = 0), correct the
/// estimate, apply U_t = -L_t X̃_t, step the plant.  Noise for W_t comes from
/// stream (seed, run, t, process tag).  Throws NumericalError naming t when
/// the state leaves the finite range.
SimTrace simulate_run(const Instance& inst, const SelectionPolicy& policy, std::uint64_t seed,
                      std::uint64_t run = 0, const SimOptions& opts = {});

/// Recomputes the total cost from states, inputs and selections.
double audit_cost(const Instance& inst, const SimTrace& trace);

/// (1/T) sum_t log2(levels of theta_t).
double bit_rate(const QuantizerBank& bank, const std::vector<std::size_t>& selections);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct ExperimentResult {
  std::size_t n_runs = 0;
  Estimate total;
  Estimate lqg;
  Estimate quant;
  double bit_rate = 0.0;
  /// utilization(t-1, i) = uses of quantizer i over steps 0..t-1, divided by
  /// t * n_runs; rows t = 1..T.
  Matrix utilization;
  std::vector<SimTrace> traces;
};

struct MonteCarloOptions {
  std::size_t n_runs = 10000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means one.
  unsigned threads = 1;
  /// Number of leading runs whose full traces are kept.
  std::size_t keep_traces = 0;
};

/// Independent runs 0..n_runs-1 with per-run streams; aggregation is in run
/// order with pairwise summation so the result does not depend on `threads`.
ExperimentResult monte_carlo(const Instance& inst, const SelectionPolicy& policy,
                             const MonteCarloOptions& opts);

/// Utilization from traces (same definition as ExperimentResult).
Matrix utilization(const std::vector<SimTrace>& traces, std::size_t num_quantizers);

/// Utilization of a fixed schedule, identical to running it n times.
Matrix utilization_from_schedule(const std::vector<std::size_t>& selections,
                                 std::size_t num_quantizers);

/// Pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t count);

}  // namespace qflqg
