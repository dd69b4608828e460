#pragma once

#include <string>
#include <vector>

#include "qflqg/linalg.hpp"
#include "qflqg/noise.hpp"

namespace qflqg {

/// Axis-aligned half-open box [lower, upper); bounds may be infinite.
struct Cell {
  Vector lower;
  Vector upper;

  bool contains(const Vector& w) const;
};

/// Product partition of R^n from per-axis breakpoint lists.  An empty list
/// leaves that axis unsplit.  Cells are enumerated with the first axis
/// varying slowest.
std::vector<Cell> grid_cells(const std::vector<std::vector<double>>& breakpoints);

/// A quantizer of the noise distribution it was built against.
///
/// Centroids are always the conditional means E[W | W in cell]; any
/// representative points supplied by the user are kept for output only.
struct Quantizer {
  std::vector<Cell> cells;
  std::vector<Vector> centroids;
  std::vector<double> probs;
  double cost = 0.0;
  /// Covariance of the centroid estimate, sum_j p_j q_j q_jᵀ.
  Matrix F;
  std::vector<Vector> representatives;

  std::size_t levels() const { return cells.size(); }
};

struct Quantized {
  std::size_t cell = 0;
  Vector centroid;
};

/// Quantizer over N(0, noise_cov).  Diagonal covariances use closed-form
/// truncated-normal moments; other covariances (positive definite) use
/// sequential conditioning on the Cholesky factor with a fixed 2^16-point
/// Hammersley set.  Throws NumericalError("degenerate cell ...") when a
/// cell has probability below 1e-12.
Quantizer build_quantizer(std::vector<Cell> cells, const Matrix& noise_cov, double cost);

/// Quantizer over a finite-support distribution.  Cells holding no support
/// point get probability 0 and a zero centroid; they can never be selected
/// by `quantize` on a support point.
Quantizer build_quantizer(std::vector<Cell> cells, const DiscreteDistribution& noise, double cost);

/// Single-level quantizer: q = {0}, p = {1}, F = 0, zero cost.
Quantizer open_loop_quantizer(Eigen::Index n);

/// Unique cell containing w and its centroid.  Throws NumericalError
/// ("partition gap at w") if no cell contains w.
Quantized quantize(const Quantizer& q, const Vector& w);

/// E[W | channel output o] for a noisy channel between quantizer and
/// controller.  `channel(j, o)` is the probability of output o given cell j;
/// rows must sum to one.  Throws NumericalError("impossible observation") if o
/// has zero marginal probability.
Vector channel_posterior_mean(const Quantizer& q, const Matrix& channel, Eigen::Index observed);

/// Truncated-normal moments of N(0, sigma²) on [a, b).
struct IntervalMoments {
  double prob;
  double mean;
};
IntervalMoments interval_moments(double a, double b, double sigma);

/// Description of one quantizer before it is built against a distribution.
struct QuantizerSpec {
  std::vector<Cell> cells;
  double cost = 0.0;
  std::vector<Vector> representatives;
};

QuantizerSpec grid_quantizer_spec(const std::vector<std::vector<double>>& breakpoints, double cost);

struct BankSpec {
  std::vector<QuantizerSpec> quantizers;
  /// Prepend the free single-level quantizer as index 0.
  bool include_open_loop = false;
};

/// The quantizers available at every step, built twice: against the process
/// noise (steps k >= 1 quantize W_{k-1}) and against the initial covariance
/// (step 0 quantizes W_{-1} = X_0 - mu_0).
struct QuantizerBank {
  std::vector<Quantizer> noise;
  std::vector<Quantizer> initial;
  std::vector<std::string> warnings;

  std::size_t size() const { return noise.size(); }
  const Quantizer& at(int k, std::size_t i) const { return k == 0 ? initial[i] : noise[i]; }
  double cost(std::size_t i) const { return noise[i].cost; }
};

QuantizerBank build_bank(const BankSpec& spec, const Matrix& noise_cov, const Matrix& init_cov);
QuantizerBank build_bank(const BankSpec& spec, const DiscreteDistribution& noise,
                         const DiscreteDistribution& initial);

}  // namespace qflqg
