#include <gtest/gtest.h>

#include <random>

#include "qflqg/estimator.hpp"
#include "qflqg/quantizer.hpp"
#include "support/oracles.hpp"

namespace qflqg {
namespace {

TEST(Estimator, PredictHandValues) {
  SystemModel scalar = testing::scalar_model(2.0, 1.0, 0.25, 1.0, 3);
  EstimatorState st = initial_estimator(scalar);
  EXPECT_EQ(st.x_predicted(0), 0.0);
  st = predict(st, scalar, Vector::Zero(1));
  EXPECT_EQ(st.x_predicted(0), 0.0);
  st.x_filtered = Vector::Constant(1, 1.0);
  st = predict(st, scalar, Vector::Constant(1, -1.0));
  EXPECT_EQ(st.x_predicted(0), 1.0);
  EXPECT_EQ(st.x_filtered(0), 1.0);  // untouched until the centroid arrives

  const SystemModel model = testing::example_model(testing::unstable_A());
  EstimatorState s2 = initial_estimator(model);
  s2.x_filtered = Vector::Ones(2);
  s2 = predict(s2, model, Vector::Zero(2));
  EXPECT_NEAR(s2.x_predicted(0), 1.51, 1e-15);
  EXPECT_NEAR(s2.x_predicted(1), 1.1, 1e-15);
}

TEST(Estimator, CorrectAddsCentroid) {
  EstimatorState st;
  st.x_predicted = Vector(2);
  st.x_predicted << 1.0, 0.0;
  st.x_filtered = Vector::Zero(2);
  Vector w_hat(2);
  w_hat << 0.39894, -0.39894;
  const EstimatorState c = correct(st, w_hat);
  EXPECT_DOUBLE_EQ(c.x_filtered(0), 1.39894);
  EXPECT_DOUBLE_EQ(c.x_filtered(1), -0.39894);
  EXPECT_EQ(correct(st, Vector::Zero(2)).x_filtered, st.x_predicted);
}

TEST(Estimator, InitialStepUsesInitialMean) {
  SystemModel model = testing::example_model(testing::stable_A());
  model.init_mean << 0.3, -2.0;
  const EstimatorState st = initial_estimator(model);
  EXPECT_EQ(st.x_predicted, model.init_mean);
  Vector w_hat(2);
  w_hat << 0.79788, -0.79788;
  const EstimatorState c = correct(st, w_hat);
  EXPECT_EQ(c.x_filtered, model.init_mean + w_hat);
}

TEST(ErrorCovariance, HandValuesAndLimits) {
  const SystemModel scalar = testing::scalar_model(1.0, 1.0, 0.25, 1.0, 3);
  const Matrix next = propagate_error_cov(Matrix::Constant(1, 1, 0.0908), scalar, Matrix::Constant(1, 1, 0.15915));
  EXPECT_NEAR(next(0, 0), 0.0908 + 0.25 - 0.15915, 1e-15);
  EXPECT_NEAR(next(0, 0), 0.18165, 1e-12);

  const SystemModel model = testing::example_model(testing::unstable_A());
  const Matrix sigma = (Matrix(2, 2) << 0.4, 0.1, 0.1, 0.3).finished();
  const Matrix perfect = propagate_error_cov(sigma, model, model.noise_cov);
  EXPECT_NEAR((perfect - model.A * sigma * model.A.transpose()).norm(), 0.0, 1e-15);
  EXPECT_EQ(propagate_error_cov(Matrix::Zero(2, 2), model, Matrix::Zero(2, 2)), model.noise_cov);
  EXPECT_THROW(propagate_error_cov(Matrix::Zero(2, 2), model, 2.0 * model.noise_cov), NumericalError);
  EXPECT_EQ(initial_error_cov(model, Matrix::Zero(2, 2)), model.init_cov);
}

// Sample the error recursion directly and compare mean and covariance with
// the propagated covariance under a fixed schedule.
TEST(ErrorCovariance, MonteCarloMatchesPropagation) {
  const SystemModel model = testing::example_model(testing::stable_A());
  const Quantizer q_noise = build_quantizer(grid_cells({{0.0}, {0.0}}), model.noise_cov, 0.0);
  const Quantizer q_half = build_quantizer(grid_cells({{0.0}, {}}), model.noise_cov, 0.0);
  const Quantizer q_init = build_quantizer(grid_cells({{-0.5, 0.0, 0.5}, {0.0}}), model.init_cov, 0.0);
  const std::vector<const Quantizer*> schedule{&q_init, &q_noise, &q_half, &q_noise, &q_half, &q_half};

  std::vector<Matrix> cov{initial_error_cov(model, q_init.F)};
  for (std::size_t t = 1; t < schedule.size(); ++t) cov.push_back(propagate_error_cov(cov.back(), model, schedule[t]->F));

  const std::size_t runs = 100000;
  const std::size_t steps = schedule.size();
  std::vector<Vector> sum(steps, Vector::Zero(2));
  std::vector<Matrix> sum_sq(steps, Matrix::Zero(2, 2));
  std::vector<Matrix> sum_4(steps, Matrix::Zero(2, 2));
  std::mt19937_64 gen(99);
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < runs; ++r) {
    Vector w0(2);
    w0 << normal(gen), normal(gen);  // init_cov = I
    Vector delta = w0 - quantize(q_init, w0).centroid;
    for (std::size_t t = 0; t < steps; ++t) {
      if (t > 0) {
        Vector w(2);
        w << 0.5 * normal(gen), 0.5 * normal(gen);
        delta = next_delta(model.A, delta, w, quantize(*schedule[t], w).centroid);
      }
      sum[t] += delta;
      const Matrix outer = delta * delta.transpose();
      sum_sq[t] += outer;
      sum_4[t] += outer.cwiseProduct(outer);
    }
  }
  const double nr = static_cast<double>(runs);
  for (std::size_t t = 0; t < steps; ++t) {
    const Vector mean = sum[t] / nr;
    const Matrix second = sum_sq[t] / nr;
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(mean(i), 0.0, 4.0 * std::sqrt(second(i, i) / nr)) << "t=" << t;
      for (int j = 0; j < 2; ++j) {
        const double var = sum_4[t](i, j) / nr - second(i, j) * second(i, j);
        EXPECT_NEAR(second(i, j), cov[t](i, j), 3.0 * std::sqrt(var / nr)) << "t=" << t << " (" << i << "," << j << ")";
      }
    }
  }
}

TEST(NextDelta, MatchesDefinition) {
  const Matrix A = testing::unstable_A();
  Vector d(2), w(2), wh(2);
  d << 0.3, -0.2;
  w << 0.1, 0.4;
  wh << 0.39894, 0.39894;
  EXPECT_NEAR((next_delta(A, d, w, wh) - (A * d + w - wh)).norm(), 0.0, 1e-15);
}

}  // namespace
}  // namespace qflqg
