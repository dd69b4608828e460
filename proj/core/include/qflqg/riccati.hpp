#pragma once

#include <vector>

#include "qflqg/linalg.hpp"
#include "qflqg/system_model.hpp"

namespace qflqg {

/// Offline recursions of the quantized-feedback LQG problem, indexed by
/// decision time k.
///
/// Length T+1: P, r, Pi, Upsilon.  Length T: L, N, Omega.
///
/// P, L, N, r come from the control Riccati recursion and never depend on the
/// quantizers.  Pi, Upsilon, Omega drive quantizer selection; Omega_k is the
/// weight on the residual noise covariance at step k and equals both
/// Pi_{k+1} + N_k and Upsilon_k - P_k.
struct RiccatiSolution {
  std::vector<Matrix> P;
  std::vector<Matrix> L;
  std::vector<Matrix> N;
  std::vector<double> r;
  std::vector<Matrix> Pi;
  std::vector<Matrix> Upsilon;
  std::vector<Matrix> Omega;

  int horizon() const { return static_cast<int>(L.size()); }
  bool has_selection_terms() const { return !Omega.empty(); }
};

/// Reciprocal condition estimate below which a Riccati step is rejected.
inline constexpr double kMinRcond = 1e-12;

/// Backward recursion from P_T = Q2:
///   S_k = R + Bᵀ P_{k+1} B
///   L_k = S_k⁻¹ Bᵀ P_{k+1} A
///   N_k = L_kᵀ S_k L_k
///   P_k = Q1 + Aᵀ P_{k+1} A - N_k
///   r_k = r_{k+1} + tr(P_{k+1} W)
/// Throws NumericalError("ill-conditioned Riccati step at k=...") when S_k is
/// numerically singular.
RiccatiSolution solve_control_riccati(const SystemModel& model);

/// Fills Pi (Pi_T = 0, Pi_k = Aᵀ(Pi_{k+1} + N_k)A), Upsilon (Upsilon_T = Q2,
/// Upsilon_k = Aᵀ Upsilon_{k+1} A + Q1) and Omega_k = Pi_{k+1} + N_k.
RiccatiSolution solve_selection_recursions(const SystemModel& model, RiccatiSolution ricc);

/// Both recursions.
RiccatiSolution solve_riccati(const SystemModel& model);

}  // namespace qflqg
