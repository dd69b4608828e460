#pragma once

#include "qflqg/linalg.hpp"
#include "qflqg/system_model.hpp"

namespace qflqg {

/// Controller-side estimate.  x_predicted is X̂_t = A X̃_{t-1} + B U_{t-1},
/// x_filtered is X̃_t = X̂_t + ŵ_{t-1}.  `delta` (X_t - X̃_t) is filled in by
/// the simulator for diagnostics and is never read by the controller.
struct EstimatorState {
  Vector x_filtered;
  Vector x_predicted;
  Vector delta;
};

/// X̂_0 = X̃_0 = mu_0, delta = 0.
EstimatorState initial_estimator(const SystemModel& model);

EstimatorState predict(const EstimatorState& state, const SystemModel& model, const Vector& u);

EstimatorState correct(const EstimatorState& state, const Vector& received_centroid);

/// A Sigma Aᵀ + (W - F).  Throws NumericalError when the result is not PSD.
Matrix propagate_error_cov(const Matrix& sigma_delta, const SystemModel& model, const Matrix& F);

/// Covariance of Delta_0 = W_{-1} - ŵ_{-1}: init_cov - F.
Matrix initial_error_cov(const SystemModel& model, const Matrix& F);

/// Delta_t = A Delta_{t-1} + W_{t-1} - ŵ_{t-1}.  Shared by every code path
/// that advances the error so they agree bit for bit.
Vector next_delta(const Matrix& A, const Vector& delta, const Vector& w, const Vector& w_hat);

}  // namespace qflqg
