#include "qflqg/noise.hpp"

#include <cmath>
#include <random>
#include <string>

namespace qflqg {

Vector DiscreteDistribution::mean() const {
  Vector mu = Vector::Zero(dim());
  for (std::size_t j = 0; j < points.size(); ++j) mu += weights[j] * points[j];
  return mu;
}

Matrix DiscreteDistribution::covariance() const {
  const Vector mu = mean();
  Matrix c = Matrix::Zero(dim(), dim());
  for (std::size_t j = 0; j < points.size(); ++j) {
    const Vector d = points[j] - mu;
    c += weights[j] * d * d.transpose();
  }
  return symmetrize(c);
}

DiscreteDistribution gauss_hermite_1d(int points) {
  DiscreteDistribution d;
  auto add = [&d](double x, double w) {
    d.points.push_back(Vector::Constant(1, x));
    d.weights.push_back(w);
  };
  if (points == 3) {
    const double x = std::sqrt(3.0);
    add(-x, 1.0 / 6.0);
    add(0.0, 2.0 / 3.0);
    add(x, 1.0 / 6.0);
  } else if (points == 5) {
    const double s10 = std::sqrt(10.0);
    const double inner = std::sqrt(5.0 - s10);
    const double outer = std::sqrt(5.0 + s10);
    const double w_inner = (7.0 + 2.0 * s10) / 60.0;
    const double w_outer = (7.0 - 2.0 * s10) / 60.0;
    add(-outer, w_outer);
    add(-inner, w_inner);
    add(0.0, 8.0 / 15.0);
    add(inner, w_inner);
    add(outer, w_outer);
  } else {
    throw ConfigError("sigma points: points per axis must be 3 or 5, got " +
                      std::to_string(points));
  }
  return d;
}

DiscreteDistribution sigma_point_discretization(const Matrix& cov, int points_per_axis) {
  const DiscreteDistribution axis = gauss_hermite_1d(points_per_axis);
  const Eigen::Index n = cov.rows();
  const Matrix root = psd_sqrt(cov);
  const std::size_t k = axis.size();

  std::size_t total = 1;
  for (Eigen::Index d = 0; d < n; ++d) total *= k;

  DiscreteDistribution out;
  out.points.reserve(total);
  out.weights.reserve(total);
  std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (Eigen::Index d = n - 1; d >= 0; --d) {
      digits[static_cast<std::size_t>(d)] = rem % k;
      rem /= k;
    }
    Vector z(n);
    double w = 1.0;
    for (Eigen::Index d = 0; d < n; ++d) {
      z(d) = axis.points[digits[static_cast<std::size_t>(d)]](0);
      w *= axis.weights[digits[static_cast<std::size_t>(d)]];
    }
    out.points.push_back(root * z);
    out.weights.push_back(w);
  }
  return out;
}

NoiseModel NoiseModel::gaussian(const Matrix& cov) {
  NoiseModel m;
  m.dist_ = Gaussian{cov, psd_sqrt(cov)};
  return m;
}

NoiseModel NoiseModel::discrete(DiscreteDistribution dist) {
  if (dist.points.empty() || dist.points.size() != dist.weights.size()) {
    throw ConfigError("discrete noise: empty support or weight count mismatch");
  }
  NoiseModel m;
  m.dist_ = std::move(dist);
  return m;
}

Eigen::Index NoiseModel::dim() const {
  if (const auto* g = std::get_if<Gaussian>(&dist_)) return g->cov.rows();
  return std::get<DiscreteDistribution>(dist_).dim();
}

Matrix NoiseModel::covariance() const {
  if (const auto* g = std::get_if<Gaussian>(&dist_)) return g->cov;
  return std::get<DiscreteDistribution>(dist_).covariance();
}

Vector NoiseModel::sample(CounterRng& rng) const {
  if (const auto* g = std::get_if<Gaussian>(&dist_)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(g->cov.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    return g->factor * z;
  }
  const auto& d = std::get<DiscreteDistribution>(dist_);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double acc = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    acc += d.weights[j];
    if (u < acc) return d.points[j];
  }
  return d.points.back();
}

}  // namespace qflqg
