#include <benchmark/benchmark.h>

#include "qflqg/instance.hpp"
#include "qflqg/oracle.hpp"
#include "qflqg/policies.hpp"
#include "qflqg/simulator.hpp"

namespace {

using namespace qflqg;

SystemModel example(double a11, double a12, double a22) {
  SystemModel m;
  m.A = Matrix(2, 2);
  m.A << a11, a12, 0.0, a22;
  m.B = Matrix(2, 2);
  m.B << 0.1, 0.0, 0.0, 0.15;
  m.noise_cov = 0.25 * Matrix::Identity(2, 2);
  m.init_mean = Vector::Zero(2);
  m.init_cov = Matrix::Identity(2, 2);
  m.Q1 = m.Q2 = m.R = 0.5 * Matrix::Identity(2, 2);
  m.horizon = 50;
  return m;
}

BankSpec bank(double c) {
  BankSpec spec;
  spec.quantizers.push_back(grid_quantizer_spec({{0.0}, {}}, c));
  spec.quantizers.push_back(grid_quantizer_spec({{0.0}, {0.0}}, 2 * c));
  spec.quantizers.push_back(grid_quantizer_spec({{-0.5, 0.0, 0.5}, {0.0}}, 3 * c));
  return spec;
}

void BM_Riccati(benchmark::State& state) {
  SystemModel m = example(1.01, 0.5, 1.1);
  m.horizon = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_riccati(m));
}
BENCHMARK(BM_Riccati)->Arg(50)->Arg(500);

void BM_QuantizerDiagonal(benchmark::State& state) {
  const Matrix cov = 0.25 * Matrix::Identity(2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_quantizer(grid_cells({{-0.5, 0.0, 0.5}, {0.0}}), cov, 1.0));
  }
}
BENCHMARK(BM_QuantizerDiagonal);

void BM_QuantizerCorrelated(benchmark::State& state) {
  Matrix cov(2, 2);
  cov << 0.25, 0.1, 0.1, 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(build_quantizer(grid_cells({{0.0}, {0.0}}), cov, 1.0));
}
BENCHMARK(BM_QuantizerCorrelated)->Unit(benchmark::kMillisecond);

void BM_SimulateRun(benchmark::State& state) {
  const Instance inst = make_instance(example(0.9, 0.2, 0.7), bank(0.03));
  const SelectionPolicy policy = state.range(0) == 0 ? SelectionPolicy::offline(offline_schedule(inst))
                                                     : SelectionPolicy::greedy();
  std::uint64_t run = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_run(inst, policy, 1, run++));
}
BENCHMARK(BM_SimulateRun)->Arg(0)->Arg(1);

void BM_MonteCarlo(benchmark::State& state) {
  const Instance inst = make_instance(example(0.9, 0.2, 0.7), bank(0.03));
  const SelectionPolicy policy = SelectionPolicy::offline(offline_schedule(inst));
  MonteCarloOptions mc;
  mc.n_runs = 1000;
  mc.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(inst, policy, mc));
}
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  SystemModel m;
  m.A = Matrix::Constant(1, 1, 1.2);
  m.B = Matrix::Constant(1, 1, 1.0);
  m.noise_cov = m.init_cov = Matrix::Constant(1, 1, 0.25);
  m.init_mean = Vector::Zero(1);
  m.Q1 = m.Q2 = m.R = Matrix::Identity(1, 1);
  m.horizon = static_cast<int>(state.range(0));
  BankSpec spec;
  spec.include_open_loop = true;
  spec.quantizers.push_back(grid_quantizer_spec({{0.0}}, 0.05));
  const Instance inst = make_discrete_instance(m, spec, 3);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_mdp(inst));
}
BENCHMARK(BM_Oracle)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
