#include "qflqg/riccati.hpp"

#include <string>

namespace qflqg {

RiccatiSolution solve_control_riccati(const SystemModel& model) {
  model.validate();
  const int T = model.horizon;
  const Matrix& A = model.A;
  const Matrix& B = model.B;

  RiccatiSolution out;
  out.P.resize(T + 1);
  out.L.resize(T);
  out.N.resize(T);
  out.r.assign(T + 1, 0.0);
  out.P[T] = symmetrize(model.Q2);

  for (int k = T - 1; k >= 0; --k) {
    const Matrix& next = out.P[k + 1];
    const Matrix S = symmetrize(model.R + B.transpose() * next * B);
    Eigen::LDLT<Matrix> ldlt(S);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() >= kMinRcond)) {
      throw NumericalError("ill-conditioned Riccati step at k=" + std::to_string(k));
    }
    out.L[k] = ldlt.solve(B.transpose() * next * A);
    out.N[k] = symmetrize(out.L[k].transpose() * S * out.L[k]);
    out.P[k] = symmetrize(model.Q1 + A.transpose() * next * A - out.N[k]);
    out.r[k] = out.r[k + 1] + (next * model.noise_cov).trace();
  }
  return out;
}

RiccatiSolution solve_selection_recursions(const SystemModel& model, RiccatiSolution ricc) {
  const int T = model.horizon;
  if (ricc.horizon() != T || static_cast<int>(ricc.N.size()) != T) {
    throw ConfigError("selection recursions: Riccati solution does not match horizon");
  }
  const Matrix& A = model.A;
  const Eigen::Index n = model.n();

  ricc.Pi.assign(T + 1, Matrix::Zero(n, n));
  ricc.Upsilon.resize(T + 1);
  ricc.Omega.resize(T);
  ricc.Upsilon[T] = symmetrize(model.Q2);
  for (int k = T - 1; k >= 0; --k) {
    ricc.Omega[k] = symmetrize(ricc.Pi[k + 1] + ricc.N[k]);
    ricc.Pi[k] = symmetrize(A.transpose() * ricc.Omega[k] * A);
    ricc.Upsilon[k] = symmetrize(A.transpose() * ricc.Upsilon[k + 1] * A + model.Q1);
  }
  return ricc;
}

RiccatiSolution solve_riccati(const SystemModel& model) {
  return solve_selection_recursions(model, solve_control_riccati(model));
}

}  // namespace qflqg
