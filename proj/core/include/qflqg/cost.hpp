#pragma once

#include <vector>

#include "qflqg/instance.hpp"
#include "qflqg/policies.hpp"

namespace qflqg {

/// Expected cost of an offline schedule split as
///   control_part    = mu_0ᵀ P_0 mu_0 + tr(P_0 Sigma_0) + r_0
///   estimation_part = sum_t tr(N_t Sigma_Delta_t)
///   quantizer_part  = sum_t lambda_{theta_t}
/// with Sigma_Delta_0 = Sigma_0 - F(theta_0) and
/// Sigma_Delta_{t+1} = A Sigma_Delta_t Aᵀ + W - F(theta_{t+1}).
struct CostDecomposition {
  double control_part = 0.0;
  double estimation_part = 0.0;
  double quantizer_part = 0.0;
  std::vector<Matrix> error_cov;

  double selection_part() const { return estimation_part + quantizer_part; }
  double lqg_part() const { return control_part + estimation_part; }
  double total() const { return control_part + estimation_part + quantizer_part; }
};

/// Throws NumericalError("invalid quantizer reduction matrix ...") when a
/// residual covariance is not PSD.
CostDecomposition analytic_cost_decomposition(const Instance& inst,
                                              const std::vector<std::size_t>& selections);

}  // namespace qflqg
