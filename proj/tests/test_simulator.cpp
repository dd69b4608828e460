#include <gtest/gtest.h>

#include <random>

#include "qflqg/cost.hpp"
#include "qflqg/pareto.hpp"
#include "qflqg/simulator.hpp"
#include "support/oracles.hpp"

namespace qflqg {
namespace {

using testing::scalar_model;
using testing::scalar_sign_bank;

Instance stable_instance(std::vector<double> costs = {0.03, 0.06, 0.09}) {
  return make_instance(testing::example_model(testing::stable_A()), testing::example_bank(costs));
}

TEST(SimulateRun, CostAuditForEveryPolicy) {
  const Instance inst = stable_instance();
  const OfflineSchedule sched = offline_schedule(inst);
  const std::vector<SelectionPolicy> policies{SelectionPolicy::offline(sched), SelectionPolicy::greedy(),
                                              SelectionPolicy::rollout(sched, {16, 1}),
                                              SelectionPolicy::terminal_exact()};
  for (const SelectionPolicy& p : policies) {
    for (std::uint64_t run = 0; run < 5; ++run) {
      const SimTrace tr = simulate_run(inst, p, 42, run);
      // Independent recomputation from the recorded trajectory.
      double j = 0.0;
      for (int t = 0; t < inst.horizon(); ++t) {
        const auto st = static_cast<std::size_t>(t);
        j += tr.x[st].dot(inst.model.Q1 * tr.x[st]) + tr.u[st].dot(inst.model.R * tr.u[st]) +
             inst.bank.cost(tr.selections[st]);
      }
      j += tr.x.back().dot(inst.model.Q2 * tr.x.back());
      EXPECT_NEAR(tr.total_cost, j, 1e-9 * j);
      EXPECT_NEAR(audit_cost(inst, tr), tr.total_cost, 1e-9 * j);
      EXPECT_NEAR(tr.lqg_cost + tr.quant_cost, tr.total_cost, 1e-9 * j);
      ASSERT_EQ(tr.x.size(), 51u);
      ASSERT_EQ(tr.noise.size(), 51u);
      for (int t = 0; t < inst.horizon(); ++t) {
        const auto st = static_cast<std::size_t>(t);
        EXPECT_EQ(tr.u[st], Vector(-inst.ricc.L[st] * tr.x_filtered[st]));
        EXPECT_NEAR((tr.delta[st] - (tr.x[st] - tr.x_filtered[st])).norm(), 0.0, 1e-12);
      }
    }
  }
}

TEST(SimulateRun, NoNoiseIsDeterministicLqr) {
  SystemModel model = testing::example_model(testing::unstable_A());
  model.noise_cov.setZero();
  model.init_cov.setZero();
  model.init_mean << 1.5, -0.7;
  BankSpec bank;
  bank.include_open_loop = true;
  const Instance inst = make_instance(model, bank);
  const SimTrace tr = simulate_run(inst, SelectionPolicy::offline(offline_schedule(inst)), 3);
  Vector x = model.init_mean;
  for (int t = 0; t < model.horizon; ++t) {
    const auto st = static_cast<std::size_t>(t);
    EXPECT_EQ(tr.delta[st], Vector::Zero(2));
    EXPECT_NEAR((tr.x[st] - x).norm(), 0.0, 1e-12 * std::max(1.0, x.norm()));
    x = model.A * x - model.B * (inst.ricc.L[st] * x);
  }
  const double lqr = model.init_mean.dot(inst.ricc.P[0] * model.init_mean);
  EXPECT_NEAR(tr.total_cost, lqr, 1e-9 * lqr);
  EXPECT_NEAR(analytic_cost_decomposition(inst, offline_schedule(inst).selections).total(), lqr, 1e-9 * lqr);
}

TEST(SimulateRun, FineQuantizerApproachesPerfectFeedback) {
  const double a = 0.9;
  const SystemModel model = scalar_model(a, 1.0, 0.25, 0.25, 30);
  std::vector<double> bp;
  for (int i = -250; i <= 250; ++i) bp.push_back(0.01 * i);
  BankSpec bank;
  bank.quantizers.push_back(grid_quantizer_spec({bp}, 0.0));
  const Instance inst = make_instance(model, bank);
  for (std::uint64_t run = 0; run < 20; ++run) {
    const SimTrace tr = simulate_run(inst, SelectionPolicy::offline(offline_schedule(inst)), 5, run);
    // Perfect feedback on the same noise realization.  Each step adds at most
    // one cell width of error, and the error decays with a.
    const double delta_bound = 0.01 / (1.0 - a);
    double x = tr.noise[0](0);
    double gap = 0.0;
    for (int t = 0; t < model.horizon; ++t) {
      const auto st = static_cast<std::size_t>(t);
      EXPECT_LE(std::abs(tr.delta[st](0)), delta_bound);
      EXPECT_LE(std::abs(tr.x[st](0) - x), gap + 1e-12);
      const double L = inst.ricc.L[st](0, 0);
      gap = std::abs(a - L) * gap + std::abs(L) * delta_bound;
      x = a * x - L * x + tr.noise[st + 1](0);
    }
  }
}

TEST(SimulateRun, ErrorSequenceIgnoresControlGains) {
  const Instance inst = stable_instance();
  const SelectionPolicy off = SelectionPolicy::offline(offline_schedule(inst));
  SimOptions half;
  for (const Matrix& L : inst.ricc.L) half.gains.push_back(0.5 * L);
  const SimTrace a = simulate_run(inst, off, 11, 2);
  const SimTrace b = simulate_run(inst, off, 11, 2, half);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_NE(a.x, b.x);

  const Instance unstable = make_instance(testing::example_model(testing::unstable_A()),
                                          testing::example_bank({1e4, 2e4, 3e4}));
  const SelectionPolicy off_u = SelectionPolicy::offline(offline_schedule(unstable));
  SimOptions zero;
  for (const Matrix& L : unstable.ricc.L) zero.gains.push_back(Matrix::Zero(L.rows(), L.cols()));
  EXPECT_EQ(simulate_run(unstable, off_u, 1).delta, simulate_run(unstable, off_u, 1, 0, zero).delta);
}

TEST(SimulateRun, OverflowNamesTheStep) {
  const Instance inst = make_instance(scalar_model(1.0, 1.0, 0.25, 1.0, 6), scalar_sign_bank(0.1));
  SimOptions wild;
  for (int t = 0; t < 6; ++t) wild.gains.push_back(Matrix::Constant(1, 1, -1e200));
  try {
    simulate_run(inst, SelectionPolicy::greedy(), 1, 0, wild);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("t="), std::string::npos);
  }
  SimOptions short_gains;
  short_gains.gains.resize(2, Matrix::Zero(1, 1));
  EXPECT_THROW(simulate_run(inst, SelectionPolicy::greedy(), 1, 0, short_gains), ConfigError);
}

TEST(MonteCarlo, SingleRunEqualsSimulateRun) {
  const Instance inst = stable_instance();
  const SelectionPolicy off = SelectionPolicy::offline(offline_schedule(inst));
  MonteCarloOptions mc;
  mc.n_runs = 1;
  mc.seed = 9;
  mc.keep_traces = 1;
  const ExperimentResult r = monte_carlo(inst, off, mc);
  const SimTrace tr = simulate_run(inst, off, 9, 0);
  EXPECT_EQ(r.total.mean, tr.total_cost);
  EXPECT_EQ(r.lqg.mean, tr.lqg_cost);
  EXPECT_EQ(r.quant.mean, tr.quant_cost);
  EXPECT_EQ(r.total.std_error, 0.0);
  EXPECT_EQ(r.traces.at(0).x, tr.x);
  mc.n_runs = 0;
  EXPECT_THROW(monte_carlo(inst, off, mc), ConfigError);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  const Instance inst = stable_instance();
  const SelectionPolicy g = SelectionPolicy::greedy();
  MonteCarloOptions mc;
  mc.n_runs = 300;
  mc.seed = 5;
  mc.keep_traces = 300;
  mc.threads = 1;
  const ExperimentResult a = monte_carlo(inst, g, mc);
  mc.threads = 4;
  const ExperimentResult b = monte_carlo(inst, g, mc);
  EXPECT_EQ(a.total.mean, b.total.mean);
  EXPECT_EQ(a.total.std_error, b.total.std_error);
  EXPECT_EQ(a.lqg.mean, b.lqg.mean);
  EXPECT_EQ(a.utilization, b.utilization);
  EXPECT_EQ(a.bit_rate, b.bit_rate);
  for (std::size_t i = 0; i < a.traces.size(); ++i) EXPECT_EQ(a.traces[i].x, b.traces[i].x);
  EXPECT_EQ(a.utilization, utilization(a.traces, inst.num_quantizers()));
}

TEST(MonteCarlo, MeanErrorIsZeroAndCovarianceMatches) {
  const Instance inst = stable_instance();
  const OfflineSchedule sched = offline_schedule(inst);
  MonteCarloOptions mc;
  mc.n_runs = 10000;
  mc.seed = 12;
  mc.keep_traces = mc.n_runs;
  const ExperimentResult r = monte_carlo(inst, SelectionPolicy::offline(sched), mc);
  const CostDecomposition analytic = analytic_cost_decomposition(inst, sched.selections);
  const double n = static_cast<double>(mc.n_runs);
  for (int t = 0; t < inst.horizon(); t += 7) {
    const auto st = static_cast<std::size_t>(t);
    Vector sum = Vector::Zero(2);
    Matrix sq = Matrix::Zero(2, 2);
    for (const SimTrace& tr : r.traces) {
      sum += tr.delta[st];
      sq += tr.delta[st] * tr.delta[st].transpose();
    }
    const Vector mean = sum / n;
    const Matrix second = sq / n;
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(mean(i), 0.0, 4.0 * std::sqrt(second(i, i) / n)) << "t=" << t;
      // Gaussian-ish fourth moment bound for the sample variance.
      EXPECT_NEAR(second(i, i), analytic.error_cov[st](i, i), 4.0 * std::sqrt(2.0 / n) * analytic.error_cov[st](i, i))
          << "t=" << t;
    }
  }
  EXPECT_NEAR(r.total.mean, analytic.total(), 3.0 * r.total.std_error);
  EXPECT_NEAR(r.quant.mean, analytic.quantizer_part, 1e-12);
}

TEST(Utilization, ScheduleCountingMatchesSimulation) {
  const Instance inst = stable_instance();
  const OfflineSchedule sched = offline_schedule(inst);
  MonteCarloOptions mc;
  mc.n_runs = 37;
  mc.seed = 1;
  const ExperimentResult r = monte_carlo(inst, SelectionPolicy::offline(sched), mc);
  EXPECT_EQ(r.utilization, utilization_from_schedule(sched.selections, inst.num_quantizers()));
  for (Eigen::Index t = 0; t < r.utilization.rows(); ++t) EXPECT_NEAR(r.utilization.row(t).sum(), 1.0, 1e-15);

  // Hand count.
  const Matrix u = utilization_from_schedule({0, 1, 1, 2}, 3);
  EXPECT_EQ(u(0, 0), 1.0);
  EXPECT_EQ(u(1, 1), 0.5);
  EXPECT_EQ(u(2, 1), 2.0 / 3.0);
  EXPECT_EQ(u(3, 2), 0.25);

  BankSpec single;
  single.quantizers.push_back(grid_quantizer_spec({{0.0}, {0.0}}, 1.0));
  const Instance one = make_instance(testing::example_model(testing::stable_A()), single);
  const ExperimentResult r1 = monte_carlo(one, SelectionPolicy::greedy(), mc);
  EXPECT_EQ(r1.utilization, Matrix::Ones(50, 1));
}

TEST(BitRate, LevelsPerStep) {
  const Instance inst = stable_instance();
  EXPECT_EQ(bit_rate(inst.bank, {0, 1, 2, 2}), 2.25);
  EXPECT_EQ(bit_rate(inst.bank, {0, 0}), 1.0);
  const Instance free_bank = make_instance(scalar_model(1.0, 1.0, 0.25, 1.0, 2), scalar_sign_bank(0.1));
  EXPECT_EQ(bit_rate(free_bank.bank, {0, 0}), 0.0);
}

TEST(Separation, PricesChangeSelectionsNotGains) {
  const Instance cheap = stable_instance({1e-4, 2e-4, 3e-4});
  const Instance dear = stable_instance({1, 2, 3});
  for (std::size_t k = 0; k < cheap.ricc.L.size(); ++k) {
    EXPECT_EQ(cheap.ricc.L[k], dear.ricc.L[k]);
    EXPECT_EQ(cheap.ricc.P[k], dear.ricc.P[k]);
  }
  const OfflineSchedule a = offline_schedule(cheap), b = offline_schedule(dear);
  EXPECT_NE(a.selections, b.selections);
  const SimTrace ta = simulate_run(cheap, SelectionPolicy::offline(a), 4);
  const SimTrace tb = simulate_run(dear, SelectionPolicy::offline(b), 4);
  EXPECT_NE(ta.quant_cost, tb.quant_cost);
  EXPECT_EQ(ta.noise, tb.noise);
}

TEST(PairwiseSum, MatchesExtendedPrecision) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1e6);
  std::vector<double> v(100001);
  long double exact = 0.0L;
  for (double& x : v) {
    x = u(gen);
    exact += x;
  }
  EXPECT_NEAR(pairwise_sum(v.data(), v.size()), static_cast<double>(exact), 1e-13 * static_cast<double>(exact));
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
  EXPECT_EQ(pairwise_sum(v.data(), 1), v[0]);
}

TEST(Pareto, DefaultGrid) {
  const std::vector<double> g = default_beta_grid();
  ASSERT_EQ(g.size(), 25u);
  EXPECT_NEAR(g.front(), 0.01 * std::pow(100.0, 1.0 / 25.0), 1e-15);
  EXPECT_EQ(g.back(), 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}

TEST(Pareto, SweepEndpointsAndFrontier) {
  const Instance inst = stable_instance();
  MonteCarloOptions mc;
  mc.n_runs = 400;
  mc.seed = 3;
  const std::vector<ParetoPoint> pts = pareto_sweep(inst, {0.2, 0.5, 0.8, 0.95, 1.0}, mc);
  ASSERT_EQ(pts.size(), 5u);
  for (std::size_t s : pts.back().selections) EXPECT_EQ(s, 2u);
  EXPECT_EQ(pts.back().lambda_scale, 0.0);
  EXPECT_NEAR(pts.front().lambda_scale, 4.0, 1e-15);
  for (const ParetoPoint& p : pts) {
    double q = 0.0;
    for (std::size_t s : p.selections) q += inst.bank.cost(s);
    EXPECT_NEAR(p.quant, q, 1e-12);
  }
  // Analytic LQG part never increases as beta grows; the prices only shrink.
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_LE(pts[i].analytic_lqg, pts[i - 1].analytic_lqg + 1e-9);
    EXPECT_GE(pts[i].quant, pts[i - 1].quant - 1e-12);
  }
  std::vector<const ParetoPoint*> kept;
  for (const ParetoPoint& p : pts) {
    if (!p.dominated) kept.push_back(&p);
  }
  std::sort(kept.begin(), kept.end(), [](auto* a, auto* b) { return a->quant < b->quant; });
  for (std::size_t i = 1; i < kept.size(); ++i) EXPECT_LE(kept[i]->lqg.mean, kept[i - 1]->lqg.mean);
}

TEST(Pareto, DominanceMarking) {
  std::vector<ParetoPoint> pts(4);
  pts[0].lqg.mean = 10;
  pts[0].quant = 1;
  pts[1].lqg.mean = 8;
  pts[1].quant = 2;
  pts[2].lqg.mean = 9;
  pts[2].quant = 3;  // dominated by 1
  pts[3].lqg.mean = 8;
  pts[3].quant = 2;  // equal to 1: not strictly beaten
  mark_dominated(pts);
  EXPECT_FALSE(pts[0].dominated);
  EXPECT_FALSE(pts[1].dominated);
  EXPECT_TRUE(pts[2].dominated);
  EXPECT_FALSE(pts[3].dominated);
}

}  // namespace
}  // namespace qflqg
