#pragma once

#include <variant>
#include <vector>

#include "qflqg/linalg.hpp"
#include "qflqg/rng.hpp"

namespace qflqg {

/// Finite-support distribution on R^n.
struct DiscreteDistribution {
  std::vector<Vector> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  Eigen::Index dim() const { return points.empty() ? 0 : points.front().size(); }
  Vector mean() const;
  Matrix covariance() const;
};

/// Gauss-Hermite nodes and weights for the standard normal (3 or 5 points),
/// tensorized over the axes of N(0, cov) through the symmetric square root of
/// cov.  The result matches the mean and covariance of N(0, cov) exactly.
DiscreteDistribution sigma_point_discretization(const Matrix& cov, int points_per_axis);

/// Standard-normal Gauss-Hermite rule on one axis.
DiscreteDistribution gauss_hermite_1d(int points);

/// Source of independent noise vectors, either Gaussian or finitely supported.
class NoiseModel {
 public:
  struct Gaussian {
    Matrix cov;
    Matrix factor;  // factor * factorᵀ == cov
  };

  static NoiseModel gaussian(const Matrix& cov);
  static NoiseModel discrete(DiscreteDistribution dist);

  Eigen::Index dim() const;
  bool is_discrete() const { return std::holds_alternative<DiscreteDistribution>(dist_); }
  const DiscreteDistribution& support() const { return std::get<DiscreteDistribution>(dist_); }
  Matrix covariance() const;

  /// Draws one vector from the stream; consumes a deterministic number of
  /// generator outputs per call for a fixed dimension.
  Vector sample(CounterRng& rng) const;

 private:
  std::variant<Gaussian, DiscreteDistribution> dist_;
};

}  // namespace qflqg
