#include "qflqg/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace qflqg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateProb = 1e-12;

double normal_pdf(double x) {
  if (!std::isfinite(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Upper tail P(Z >= x).
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

void validate_cells(const std::vector<Cell>& cells, Eigen::Index n) {
  if (cells.empty()) throw ConfigError("quantizer: no cells");
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const Cell& c = cells[j];
    if (c.lower.size() != n || c.upper.size() != n) {
      throw ConfigError("quantizer: cell " + std::to_string(j) + " has wrong dimension");
    }
    for (Eigen::Index d = 0; d < n; ++d) {
      if (!(c.lower(d) < c.upper(d))) {
        throw ConfigError("quantizer: cell " + std::to_string(j) + " is empty on axis " +
                          std::to_string(d));
      }
    }
  }
}

std::ptrdiff_t find_cell(const std::vector<Cell>& cells, const Vector& w) {
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (cells[j].contains(w)) return static_cast<std::ptrdiff_t>(j);
  }
  return -1;
}

Matrix reduction_matrix(const std::vector<double>& probs, const std::vector<Vector>& centroids,
                        Eigen::Index n) {
  Matrix F = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    F += probs[j] * centroids[j] * centroids[j].transpose();
  }
  return symmetrize(F);
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
constexpr std::size_t kRulePoints = std::size_t{1} << 16;

double normal_quantile(double p) {
  p = std::clamp(p, 1e-300, 1.0 - 1e-16);
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

// Mass of [lo, hi) under N(0, 1), evaluated in whichever tail keeps precision.
double std_mass(double lo, double hi) {
  return lo > 0.0 ? normal_sf(lo) - normal_sf(hi) : normal_cdf(hi) - normal_cdf(lo);
}

// Inverse-CDF draw from N(0, 1) truncated to [lo, hi) at uniform t.
double std_truncated_draw(double lo, double hi, double t) {
  if (lo > 0.0) {  // upper tail: reflect into the lower tail
    const double a = normal_cdf(-hi), b = normal_cdf(-lo);
    return -normal_quantile(a + t * (b - a));
  }
  const double a = normal_cdf(lo), b = normal_cdf(hi);
  return normal_quantile(a + t * (b - a));
}

// Probability and first moment of a box under N(0, L Lᵀ) by sequential
// conditioning: axis i is drawn from its truncated conditional given the
// earlier axes, the last axis enters through its truncated mean.  The
// integrand over the first n-1 axes is smooth, so a fixed Hammersley set
// (first coordinate (j - 1/2)/N, then radical inverses) converges fast.
struct BoxMoments {
  double prob = 0.0;
  Vector first;
};

BoxMoments box_moments(const Cell& cell, const Matrix& L) {
  const Eigen::Index n = L.rows();
  BoxMoments out;
  out.first = Vector::Zero(n);
  Vector y(n);
  for (std::size_t j = 0; j < kRulePoints; ++j) {
    double weight = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double shift = L.row(i).head(i).dot(y.head(i));
      const double lo = (cell.lower(i) - shift) / L(i, i);
      const double hi = (cell.upper(i) - shift) / L(i, i);
      const double mass = std_mass(lo, hi);
      weight *= mass;
      if (!(mass > 0.0)) break;
      if (i + 1 < n) {
        const double t = i == 0 ? (static_cast<double>(j) + 0.5) / static_cast<double>(kRulePoints)
                                : radical_inverse(j + 1, kPrimes[i - 1]);
        y(i) = std_truncated_draw(lo, hi, t);
      } else {
        y(i) = (normal_pdf(lo) - normal_pdf(hi)) / mass;
      }
    }
    if (!(weight > 0.0)) continue;
    out.prob += weight;
    out.first += weight * (L * y);
  }
  out.prob /= static_cast<double>(kRulePoints);
  out.first /= static_cast<double>(kRulePoints);
  return out;
}

bool is_diagonal(const Matrix& m) {
  return (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

bool Cell::contains(const Vector& w) const {
  for (Eigen::Index d = 0; d < w.size(); ++d) {
    if (!(w(d) >= lower(d) && w(d) < upper(d))) return false;
  }
  return true;
}

std::vector<Cell> grid_cells(const std::vector<std::vector<double>>& breakpoints) {
  const auto n = static_cast<Eigen::Index>(breakpoints.size());
  if (n == 0) throw ConfigError("grid quantizer: no axes");
  std::vector<std::vector<double>> edges;
  for (std::size_t d = 0; d < breakpoints.size(); ++d) {
    const auto& b = breakpoints[d];
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!std::isfinite(b[i]) || (i > 0 && !(b[i - 1] < b[i]))) {
        throw ConfigError("grid quantizer: breakpoints on axis " + std::to_string(d) +
                          " must be finite and strictly increasing");
      }
    }
    std::vector<double> e{-kInf};
    e.insert(e.end(), b.begin(), b.end());
    e.push_back(kInf);
    edges.push_back(std::move(e));
  }

  std::size_t total = 1;
  for (const auto& e : edges) total *= e.size() - 1;
  std::vector<Cell> cells;
  cells.reserve(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    for (Eigen::Index d = n - 1; d >= 0; --d) {
      const std::size_t k = edges[static_cast<std::size_t>(d)].size() - 1;
      idx[static_cast<std::size_t>(d)] = rem % k;
      rem /= k;
    }
    Cell cell{Vector(n), Vector(n)};
    for (Eigen::Index d = 0; d < n; ++d) {
      const auto& e = edges[static_cast<std::size_t>(d)];
      cell.lower(d) = e[idx[static_cast<std::size_t>(d)]];
      cell.upper(d) = e[idx[static_cast<std::size_t>(d)] + 1];
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

IntervalMoments interval_moments(double a, double b, double sigma) {
  if (sigma <= 0.0) {
    const bool hit = a <= 0.0 && 0.0 < b;
    return {hit ? 1.0 : 0.0, 0.0};
  }
  const double za = a / sigma;
  const double zb = b / sigma;
  // Subtract in whichever tail keeps the difference well conditioned.
  const double prob = za >= 0.0 ? normal_sf(za) - normal_sf(zb) : normal_cdf(zb) - normal_cdf(za);
  if (prob <= 0.0) return {0.0, 0.0};
  return {prob, sigma * (normal_pdf(za) - normal_pdf(zb)) / prob};
}

Quantizer build_quantizer(std::vector<Cell> cells, const Matrix& noise_cov, double cost) {
  const Eigen::Index n = noise_cov.rows();
  validate_cells(cells, n);
  if (!(cost >= 0.0) || !std::isfinite(cost)) throw ConfigError("quantizer: cost must be >= 0");

  Quantizer q;
  q.cost = cost;
  q.probs.assign(cells.size(), 0.0);
  q.centroids.assign(cells.size(), Vector::Zero(n));

  if (is_diagonal(noise_cov)) {
    const Vector sigma = noise_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double p = 1.0;
      for (Eigen::Index d = 0; d < n; ++d) {
        const IntervalMoments mom = interval_moments(cells[j].lower(d), cells[j].upper(d), sigma(d));
        p *= mom.prob;
        q.centroids[j](d) = mom.mean;
      }
      q.probs[j] = p;
    }
  } else {
    if (static_cast<std::size_t>(n) > std::size(kPrimes) + 1) {
      throw ConfigError("quantizer: non-diagonal covariance supported up to dimension 16");
    }
    const Eigen::LLT<Matrix> llt(noise_cov);
    if (llt.info() != Eigen::Success) {
      throw ConfigError("quantizer: non-diagonal covariance must be positive definite");
    }
    const Matrix L = llt.matrixL();
    double total = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const BoxMoments m = box_moments(cells[j], L);
      q.probs[j] = m.prob;
      if (m.prob > 0.0) q.centroids[j] = m.first / m.prob;
      total += m.prob;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw NumericalError("quantizer cells do not partition the space: total probability " +
                           std::to_string(total));
    }
  }

  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (q.probs[j] < kDegenerateProb) {
      throw NumericalError("degenerate cell " + std::to_string(j) + ": probability " +
                           std::to_string(q.probs[j]) + " below 1e-12");
    }
  }
  q.F = reduction_matrix(q.probs, q.centroids, n);
  q.cells = std::move(cells);
  q.representatives = q.centroids;
  return q;
}

Quantizer build_quantizer(std::vector<Cell> cells, const DiscreteDistribution& noise, double cost) {
  const Eigen::Index n = noise.dim();
  validate_cells(cells, n);
  if (!(cost >= 0.0) || !std::isfinite(cost)) throw ConfigError("quantizer: cost must be >= 0");

  Quantizer q;
  q.cost = cost;
  q.probs.assign(cells.size(), 0.0);
  q.centroids.assign(cells.size(), Vector::Zero(n));
  std::vector<Vector> sums(cells.size(), Vector::Zero(n));
  for (std::size_t k = 0; k < noise.size(); ++k) {
    const std::ptrdiff_t j = find_cell(cells, noise.points[k]);
    if (j < 0) throw NumericalError("partition gap at w = " + format_vector(noise.points[k]));
    q.probs[static_cast<std::size_t>(j)] += noise.weights[k];
    sums[static_cast<std::size_t>(j)] += noise.weights[k] * noise.points[k];
  }
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (q.probs[j] > 0.0) q.centroids[j] = sums[j] / q.probs[j];
  }
  q.F = reduction_matrix(q.probs, q.centroids, n);
  q.cells = std::move(cells);
  q.representatives = q.centroids;
  return q;
}

Quantizer open_loop_quantizer(Eigen::Index n) {
  Quantizer q;
  q.cells = {Cell{Vector::Constant(n, -kInf), Vector::Constant(n, kInf)}};
  q.centroids = {Vector::Zero(n)};
  q.probs = {1.0};
  q.cost = 0.0;
  q.F = Matrix::Zero(n, n);
  q.representatives = q.centroids;
  return q;
}

Quantized quantize(const Quantizer& q, const Vector& w) {
  const std::ptrdiff_t j = find_cell(q.cells, w);
  if (j < 0) throw NumericalError("partition gap at w = " + format_vector(w));
  return {static_cast<std::size_t>(j), q.centroids[static_cast<std::size_t>(j)]};
}

Vector channel_posterior_mean(const Quantizer& q, const Matrix& channel, Eigen::Index observed) {
  const auto levels = static_cast<Eigen::Index>(q.levels());
  if (channel.rows() != levels) {
    throw ConfigError("channel: expected " + std::to_string(levels) + " rows, got " +
                      std::to_string(channel.rows()));
  }
  if (observed < 0 || observed >= channel.cols()) throw ConfigError("channel: observation out of range");
  for (Eigen::Index j = 0; j < levels; ++j) {
    if ((channel.row(j).array() < 0.0).any() || std::abs(channel.row(j).sum() - 1.0) > 1e-9) {
      throw ConfigError("channel: row " + std::to_string(j) + " is not a probability vector");
    }
  }

  double marginal = 0.0;
  Vector acc = Vector::Zero(q.F.rows());
  for (Eigen::Index j = 0; j < levels; ++j) {
    const double joint = q.probs[static_cast<std::size_t>(j)] * channel(j, observed);
    marginal += joint;
    acc += joint * q.centroids[static_cast<std::size_t>(j)];
  }
  if (!(marginal > 0.0)) throw NumericalError("impossible observation " + std::to_string(observed));
  return acc / marginal;
}

QuantizerSpec grid_quantizer_spec(const std::vector<std::vector<double>>& breakpoints, double cost) {
  return QuantizerSpec{grid_cells(breakpoints), cost, {}};
}

namespace {

template <typename Distribution>
std::vector<Quantizer> build_all(const BankSpec& spec, const Distribution& dist, Eigen::Index n) {
  std::vector<Quantizer> out;
  if (spec.include_open_loop) out.push_back(open_loop_quantizer(n));
  for (const QuantizerSpec& qs : spec.quantizers) {
    Quantizer q = build_quantizer(qs.cells, dist, qs.cost);
    if (!qs.representatives.empty()) {
      if (qs.representatives.size() != q.levels()) {
        throw ConfigError("quantizer: representative count does not match cell count");
      }
      q.representatives = qs.representatives;
    }
    out.push_back(std::move(q));
  }
  if (out.empty()) throw ConfigError("bank: at least one quantizer is required");
  return out;
}

void check_reduction(const std::vector<Quantizer>& qs, const Matrix& cov) {
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const Matrix residual = cov - qs[i].F;
    if (min_eigenvalue(residual) < -1e-10 * magnitude(cov)) {
      throw NumericalError("invalid quantizer reduction matrix for quantizer " + std::to_string(i));
    }
  }
}

std::vector<std::string> ordering_warnings(const std::vector<Quantizer>& qs) {
  std::vector<std::string> w;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    if (qs[i].F.trace() < qs[i - 1].F.trace() - 1e-12) {
      w.push_back("quantizer " + std::to_string(i) + " reduces less noise variance than quantizer " +
                  std::to_string(i - 1) + " (bank is not ordered coarse to fine)");
    }
  }
  return w;
}

}  // namespace

QuantizerBank build_bank(const BankSpec& spec, const Matrix& noise_cov, const Matrix& init_cov) {
  QuantizerBank bank;
  bank.noise = build_all(spec, noise_cov, noise_cov.rows());
  bank.initial = build_all(spec, init_cov, init_cov.rows());
  check_reduction(bank.noise, noise_cov);
  check_reduction(bank.initial, init_cov);
  bank.warnings = ordering_warnings(bank.noise);
  return bank;
}

QuantizerBank build_bank(const BankSpec& spec, const DiscreteDistribution& noise,
                         const DiscreteDistribution& initial) {
  QuantizerBank bank;
  bank.noise = build_all(spec, noise, noise.dim());
  bank.initial = build_all(spec, initial, initial.dim());
  check_reduction(bank.noise, noise.covariance());
  check_reduction(bank.initial, initial.covariance());
  bank.warnings = ordering_warnings(bank.noise);
  return bank;
}

}  // namespace qflqg
