#pragma once

#include "qflqg/noise.hpp"
#include "qflqg/quantizer.hpp"
#include "qflqg/riccati.hpp"
#include "qflqg/system_model.hpp"

namespace qflqg {

/// Everything the policies and the simulator need about one problem: the
/// model, its offline recursions, the built quantizer bank and the noise
/// sources for W_{-1} (initial) and W_t, t >= 0.
struct Instance {
  SystemModel model;
  RiccatiSolution ricc;
  QuantizerBank bank;
  NoiseModel noise;
  NoiseModel initial_noise;

  int horizon() const { return model.horizon; }
  std::size_t num_quantizers() const { return bank.size(); }
  bool is_discrete() const { return noise.is_discrete(); }
};

/// Gaussian instance.  Validates the model and builds the bank against
/// N(0, noise_cov) and N(0, init_cov).
Instance make_instance(const SystemModel& model, const BankSpec& bank);

/// Same problem with W_t and W_{-1} replaced by tensorized Gauss-Hermite
/// sigma points (3 or 5 per axis).  The bank is rebuilt against the discrete
/// distributions and the model covariances are replaced by theirs.
Instance make_discrete_instance(const SystemModel& model, const BankSpec& bank, int points_per_axis);

}  // namespace qflqg
