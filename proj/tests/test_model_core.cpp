#include <gtest/gtest.h>

#include <random>

#include "qflqg/cost.hpp"
#include "qflqg/riccati.hpp"
#include "support/oracles.hpp"

namespace qflqg {
namespace {

using testing::scalar_model;

// One-step quadratic cost x² + u² + (x + u)² minimized over u by scan.
TEST(ControlRiccati, ScalarOneStepMatchesBruteForce) {
  const SystemModel model = scalar_model(1.0, 1.0, 0.3, 1.0, 1);
  const RiccatiSolution ricc = solve_control_riccati(model);

  const double x = 1.0;
  auto cost = [x](double u) { return x * x + u * u + (x + u) * (x + u); };
  const double u_star = testing::brute_force_argmin(cost, -3.0, 3.0);
  EXPECT_NEAR(ricc.L[0](0, 0), -u_star / x, 1e-7);
  EXPECT_NEAR(ricc.P[0](0, 0), cost(u_star) / (x * x), 1e-10);

  EXPECT_DOUBLE_EQ(ricc.L[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(ricc.P[0](0, 0), 1.5);
  EXPECT_DOUBLE_EQ(ricc.N[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(ricc.r[0], 0.3);
  EXPECT_DOUBLE_EQ(ricc.r[1], 0.0);
  EXPECT_DOUBLE_EQ(ricc.P[1](0, 0), 1.0);
}

TEST(ControlRiccati, ZeroInputMatrixCollapsesToLyapunov) {
  SystemModel model = scalar_model(1.3, 0.0, 0.1, 1.0, 6);
  const RiccatiSolution ricc = solve_riccati(model);
  for (int k = 0; k < model.horizon; ++k) {
    EXPECT_EQ(ricc.L[k](0, 0), 0.0);
    EXPECT_DOUBLE_EQ(ricc.P[k](0, 0), 1.0 + 1.3 * ricc.P[k + 1](0, 0) * 1.3);
  }
}

TEST(ControlRiccati, IllConditionedStepIsRejected) {
  SystemModel model;
  model.A = Matrix::Identity(2, 2);
  model.B = Matrix::Zero(2, 2);
  model.B(0, 0) = 1e8;
  model.noise_cov = Matrix::Identity(2, 2);
  model.init_mean = Vector::Zero(2);
  model.init_cov = Matrix::Identity(2, 2);
  model.Q1 = Matrix::Identity(2, 2);
  model.Q2 = Matrix::Identity(2, 2);
  model.R = Matrix::Identity(2, 2);
  model.horizon = 3;
  try {
    solve_control_riccati(model);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("ill-conditioned Riccati step at k=2"), std::string::npos);
  }
}

TEST(ControlRiccati, UnstableExampleHasFinitePsdCost) {
  const SystemModel model = testing::example_model(testing::unstable_A());
  const RiccatiSolution ricc = solve_riccati(model);
  for (const Matrix& P : ricc.P) {
    EXPECT_TRUE(P.allFinite());
    EXPECT_GE(min_eigenvalue(P), -1e-10 * P.trace());
  }
  for (int k = 0; k < model.horizon; ++k) {
    EXPECT_NEAR(ricc.r[k] - ricc.r[k + 1], (ricc.P[k + 1] * model.noise_cov).trace(), 1e-12 * ricc.r[k]);
    const Matrix& ups = ricc.Upsilon[k];
    EXPECT_TRUE(testing::close_rel(ricc.Omega[k], ups - ricc.P[k], 1e-9, ups.norm()));
  }
}

TEST(ControlRiccati, InputValidationNamesTheField) {
  SystemModel model = scalar_model(1.0, 1.0, 0.3, 1.0, 1);
  model.R(0, 0) = 0.0;
  EXPECT_THROW(solve_control_riccati(model), ConfigError);
  model = scalar_model(1.0, 1.0, -0.3, 1.0, 1);
  try {
    model.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("noise_cov"), std::string::npos);
  }
  model = scalar_model(1.0, 1.0, 0.3, 1.0, 0);
  EXPECT_THROW(model.validate(), ConfigError);
}

TEST(SelectionRecursions, ScalarHandValues) {
  const RiccatiSolution ricc = solve_riccati(scalar_model(1.0, 1.0, 0.25, 1.0, 1));
  EXPECT_DOUBLE_EQ(ricc.Pi[1](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(ricc.Pi[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(ricc.Upsilon[0](0, 0), 2.0);
  EXPECT_DOUBLE_EQ(ricc.Omega[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(ricc.Upsilon[0](0, 0) - ricc.P[0](0, 0), 0.5);
}

TEST(SelectionRecursions, ZeroDynamicsKillsPi) {
  std::mt19937_64 gen(3);
  SystemModel model = testing::random_model(gen, 3, 2, 7);
  model.A.setZero();
  const RiccatiSolution ricc = solve_riccati(model);
  for (const Matrix& Pi : ricc.Pi) EXPECT_EQ(Pi.cwiseAbs().maxCoeff(), 0.0);
  for (int k = 0; k < model.horizon; ++k) EXPECT_EQ(ricc.Omega[k], ricc.N[k]);
}

TEST(SelectionRecursions, IdentityHoldsOnRandomModels) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> dim(1, 4), inputs(1, 3), horizon(1, 20);
  for (int trial = 0; trial < 150; ++trial) {
    const SystemModel model = testing::random_model(gen, dim(gen), inputs(gen), horizon(gen));
    const RiccatiSolution ricc = solve_riccati(model);
    for (int k = 0; k <= model.horizon; ++k) {
      for (const Matrix* m : {&ricc.P[k], &ricc.Pi[k], &ricc.Upsilon[k]}) {
        EXPECT_GE(min_eigenvalue(*m), -1e-10 * std::max(1.0, m->trace()));
        EXPECT_TRUE(is_symmetric(*m, 0.0));
      }
    }
    for (int k = 0; k < model.horizon; ++k) {
      const double scale = ricc.Upsilon[k].norm();
      EXPECT_TRUE(testing::close_rel(ricc.Omega[k], ricc.Upsilon[k] - ricc.P[k], 1e-9, scale)) << "trial " << trial;
      EXPECT_TRUE(testing::close_rel(ricc.Omega[k], ricc.Pi[k + 1] + ricc.N[k], 1e-9, scale));
      EXPECT_GE(min_eigenvalue(ricc.N[k]), -1e-10 * std::max(1.0, ricc.N[k].trace()));
    }
  }
}

TEST(SelectionRecursions, GainsIgnoreTheBank) {
  const SystemModel model = testing::example_model(testing::stable_A());
  const Instance a = make_instance(model, testing::example_bank({1, 2, 3}));
  const Instance b = make_instance(model, BankSpec{{grid_quantizer_spec({{0.0}, {0.0}}, 5.0)}, true});
  for (int k = 0; k < model.horizon; ++k) {
    EXPECT_TRUE((a.ricc.L[k].array() == b.ricc.L[k].array()).all());
    EXPECT_TRUE((a.ricc.P[k].array() == b.ricc.P[k].array()).all());
  }
}

TEST(CostDecomposition, OpenLoopScheduleIsPurePrediction) {
  const SystemModel model = scalar_model(0.9, 1.0, 0.25, 0.5, 4);
  BankSpec spec;
  spec.include_open_loop = true;
  const Instance inst = make_instance(model, spec);
  const CostDecomposition cd = analytic_cost_decomposition(inst, {0, 0, 0, 0});

  double sigma = 0.5, expected = 0.0;
  for (int t = 0; t < 4; ++t) {
    if (t > 0) sigma = 0.81 * sigma + 0.25;
    expected += inst.ricc.N[t](0, 0) * sigma;
  }
  EXPECT_NEAR(cd.selection_part(), expected, 1e-14);
  EXPECT_EQ(cd.quantizer_part, 0.0);
  const RiccatiSolution& r = inst.ricc;
  EXPECT_DOUBLE_EQ(cd.control_part, r.P[0](0, 0) * 0.5 + r.r[0]);
}

TEST(CostDecomposition, OneStepHalfSpaceQuantizer) {
  const SystemModel model = scalar_model(1.0, 1.0, 0.25, 0.25, 1);
  const Instance inst = make_instance(model, testing::scalar_sign_bank(0.07));
  const CostDecomposition cd = analytic_cost_decomposition(inst, {1});
  const testing::TruncatedMoments half = testing::truncated_moments_quadrature(0.0, INFINITY, 0.5);
  const double F = half.mean * half.mean;  // two symmetric cells of mass 1/2
  EXPECT_NEAR(F, 0.15915494309189535, 1e-12);
  EXPECT_NEAR(cd.selection_part(), 0.5 * (0.25 - F) + 0.07, 1e-12);
}

TEST(CostDecomposition, RejectsInvalidReduction) {
  const SystemModel model = scalar_model(1.0, 1.0, 0.25, 0.25, 2);
  const Instance inst = make_instance(model, testing::scalar_sign_bank(0.0));
  Instance broken = inst;
  broken.bank.noise[1].F(0, 0) = 0.3;
  try {
    analytic_cost_decomposition(broken, {1, 1});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("invalid quantizer reduction matrix"), std::string::npos);
  }
  EXPECT_THROW(analytic_cost_decomposition(inst, {0}), ConfigError);
}

}  // namespace
}  // namespace qflqg
