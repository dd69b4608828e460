#pragma once

#include <vector>

#include "qflqg/instance.hpp"
#include "qflqg/simulator.hpp"

namespace qflqg {

/// One point of the weighted sweep min beta J_LQG + (1 - beta) J_quant.
struct ParetoPoint {
  double beta = 1.0;
  /// (1 - beta) / beta, applied to lambda in the selection score only.
  double lambda_scale = 0.0;
  std::vector<std::size_t> selections;
  Estimate lqg;
  /// Sum of unscaled lambda along the schedule (deterministic).
  double quant = 0.0;
  double analytic_lqg = 0.0;
  bool dominated = false;
};

/// 25 log-spaced values 0.01 * 100^(i/25), i = 1..25, ending at 1.
std::vector<double> default_beta_grid();

/// Offline schedule per beta, each simulated with the same seed.  Betas that
/// produce an already simulated schedule reuse its result.
std::vector<ParetoPoint> pareto_sweep(const Instance& inst, const std::vector<double>& betas,
                                      const MonteCarloOptions& mc);

/// Flags points weakly dominated by another point that is strictly better in
/// at least one of (lqg.mean, quant).
void mark_dominated(std::vector<ParetoPoint>& points);

}  // namespace qflqg
