#include "qflqg/instance.hpp"

namespace qflqg {

Instance make_instance(const SystemModel& model, const BankSpec& bank) {
  model.validate();
  Instance inst{model, solve_riccati(model), build_bank(bank, model.noise_cov, model.init_cov),
                NoiseModel::gaussian(model.noise_cov), NoiseModel::gaussian(model.init_cov)};
  return inst;
}

Instance make_discrete_instance(const SystemModel& model, const BankSpec& bank, int points_per_axis) {
  model.validate();
  DiscreteDistribution noise = sigma_point_discretization(model.noise_cov, points_per_axis);
  DiscreteDistribution initial = sigma_point_discretization(model.init_cov, points_per_axis);

  SystemModel discrete = model;
  discrete.noise_cov = noise.covariance();
  discrete.init_cov = initial.covariance();

  QuantizerBank built = build_bank(bank, noise, initial);
  Instance inst{discrete, solve_riccati(discrete), std::move(built),
                NoiseModel::discrete(std::move(noise)), NoiseModel::discrete(std::move(initial))};
  return inst;
}

}  // namespace qflqg
