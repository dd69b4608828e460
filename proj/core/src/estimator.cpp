#include "qflqg/estimator.hpp"

namespace qflqg {

namespace {

Matrix checked_psd(Matrix m, const char* what) {
  m = symmetrize(m);
  if (!is_psd(m)) {
    throw NumericalError(std::string("invalid quantizer reduction matrix: ") + what +
                         " is not PSD (min eigenvalue " + std::to_string(min_eigenvalue(m)) + ")");
  }
  return m;
}

}  // namespace

EstimatorState initial_estimator(const SystemModel& model) {
  return {model.init_mean, model.init_mean, Vector::Zero(model.n())};
}

EstimatorState predict(const EstimatorState& state, const SystemModel& model, const Vector& u) {
  EstimatorState next = state;
  next.x_predicted = model.A * state.x_filtered + model.B * u;
  return next;
}

EstimatorState correct(const EstimatorState& state, const Vector& received_centroid) {
  EstimatorState next = state;
  next.x_filtered = state.x_predicted + received_centroid;
  return next;
}

Matrix propagate_error_cov(const Matrix& sigma_delta, const SystemModel& model, const Matrix& F) {
  return checked_psd(model.A * sigma_delta * model.A.transpose() + (model.noise_cov - F),
                     "propagated error covariance");
}

Matrix initial_error_cov(const SystemModel& model, const Matrix& F) {
  return checked_psd(model.init_cov - F, "initial error covariance");
}

Vector next_delta(const Matrix& A, const Vector& delta, const Vector& w, const Vector& w_hat) {
  Vector d = A * delta;
  d += w;
  d -= w_hat;
  return d;
}

}  // namespace qflqg
