#include "qflqg/cost.hpp"

#include "qflqg/estimator.hpp"

namespace qflqg {

CostDecomposition analytic_cost_decomposition(const Instance& inst,
                                              const std::vector<std::size_t>& selections) {
  const SystemModel& model = inst.model;
  const RiccatiSolution& ricc = inst.ricc;
  const int T = model.horizon;
  if (static_cast<int>(selections.size()) != T) {
    throw ConfigError("schedule length " + std::to_string(selections.size()) +
                      " does not match horizon " + std::to_string(T));
  }
  for (std::size_t i : selections) {
    if (i >= inst.num_quantizers()) throw ConfigError("schedule index out of range");
  }

  for (int t = 0; t < T; ++t) {
    const Matrix& cov = t == 0 ? model.init_cov : model.noise_cov;
    if (min_eigenvalue(cov - inst.bank.at(t, selections[t]).F) < -1e-10 * magnitude(cov)) {
      throw NumericalError("invalid quantizer reduction matrix at t=" + std::to_string(t));
    }
  }

  CostDecomposition out;
  out.control_part = model.init_mean.dot(ricc.P[0] * model.init_mean) +
                     (ricc.P[0] * model.init_cov).trace() + ricc.r[0];

  Matrix sigma = initial_error_cov(model, inst.bank.at(0, selections[0]).F);
  for (int t = 0; t < T; ++t) {
    if (t > 0) sigma = propagate_error_cov(sigma, model, inst.bank.at(t, selections[t]).F);
    out.error_cov.push_back(sigma);
    out.estimation_part += (ricc.N[t] * sigma).trace();
    out.quantizer_part += inst.bank.cost(selections[t]);
  }
  return out;
}

}  // namespace qflqg
