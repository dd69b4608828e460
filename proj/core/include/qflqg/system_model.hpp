#pragma once

#include "qflqg/linalg.hpp"

namespace qflqg {

/// Plant, noise and cost description of a finite-horizon LQG problem
///
///   X_{t+1} = A X_t + B U_t + W_t,   W_t ~ N(0, noise_cov),
///   X_0 ~ N(init_mean, init_cov),
///
/// with stage weights Q1, R and terminal weight Q2 over `horizon` steps.
/// Quantizer costs live on the quantizers themselves.
struct SystemModel {
  Matrix A;
  Matrix B;
  Matrix noise_cov;
  Vector init_mean;
  Matrix init_cov;
  Matrix Q1;
  Matrix Q2;
  Matrix R;
  int horizon = 0;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

}  // namespace qflqg
