#include "qflqg/pareto.hpp"

#include <cmath>
#include <map>

#include "qflqg/cost.hpp"
#include "qflqg/policies.hpp"

namespace qflqg {

std::vector<double> default_beta_grid() {
  std::vector<double> betas;
  for (int i = 1; i <= 25; ++i) betas.push_back(i == 25 ? 1.0 : 0.01 * std::pow(100.0, i / 25.0));
  return betas;
}

std::vector<ParetoPoint> pareto_sweep(const Instance& inst, const std::vector<double>& betas,
                                      const MonteCarloOptions& mc) {
  std::map<std::vector<std::size_t>, ExperimentResult> cache;
  std::vector<ParetoPoint> points;
  for (double beta : betas) {
    if (!(beta > 0.0 && beta <= 1.0)) {
      throw ConfigError("pareto: beta must lie in (0, 1], got " + std::to_string(beta));
    }
    ParetoPoint p;
    p.beta = beta;
    p.lambda_scale = (1.0 - beta) / beta;
    OfflineSchedule schedule = offline_schedule(inst, p.lambda_scale);
    p.selections = schedule.selections;

    auto it = cache.find(p.selections);
    if (it == cache.end()) {
      MonteCarloOptions opts = mc;
      opts.keep_traces = 0;
      it = cache.emplace(p.selections, monte_carlo(inst, SelectionPolicy::offline(schedule), opts)).first;
    }
    p.lqg = it->second.lqg;
    const CostDecomposition analytic = analytic_cost_decomposition(inst, p.selections);
    p.quant = analytic.quantizer_part;
    p.analytic_lqg = analytic.lqg_part();
    points.push_back(std::move(p));
  }
  mark_dominated(points);
  return points;
}

void mark_dominated(std::vector<ParetoPoint>& points) {
  for (ParetoPoint& a : points) {
    a.dominated = false;
    for (const ParetoPoint& b : points) {
      const bool weak = b.lqg.mean <= a.lqg.mean && b.quant <= a.quant;
      const bool strict = b.lqg.mean < a.lqg.mean || b.quant < a.quant;
      if (weak && strict) {
        a.dominated = true;
        break;
      }
    }
  }
}

}  // namespace qflqg
