#include "qflqg/system_model.hpp"

namespace qflqg {

namespace {

void expect_shape(const char* name, const Matrix& x, Eigen::Index rows, Eigen::Index cols) {
  if (x.rows() != rows || x.cols() != cols) {
    throw ConfigError(std::string(name) + ": expected " + std::to_string(rows) + "x" +
                      std::to_string(cols) + ", got " + shape_string(x));
  }
  if (!all_finite(x)) throw ConfigError(std::string(name) + ": non-finite entry");
}

void expect_psd(const char* name, const Matrix& x) {
  if (!is_symmetric(x)) throw ConfigError(std::string(name) + ": not symmetric");
  if (!is_psd(x)) throw ConfigError(std::string(name) + ": not positive semidefinite");
}

}  // namespace

void SystemModel::validate() const {
  const Eigen::Index nx = A.rows();
  if (nx == 0) throw ConfigError("A: empty state dimension");
  expect_shape("A", A, nx, nx);
  if (B.rows() != nx) {
    throw ConfigError("B: expected " + std::to_string(nx) + " rows, got " + shape_string(B));
  }
  if (!all_finite(B)) throw ConfigError("B: non-finite entry");
  const Eigen::Index nu = B.cols();
  expect_shape("noise_cov", noise_cov, nx, nx);
  expect_shape("init_cov", init_cov, nx, nx);
  expect_shape("Q1", Q1, nx, nx);
  expect_shape("Q2", Q2, nx, nx);
  expect_shape("R", R, nu, nu);
  if (init_mean.size() != nx || !init_mean.allFinite()) {
    throw ConfigError("init_mean: expected finite vector of length " + std::to_string(nx));
  }
  expect_psd("noise_cov", noise_cov);
  expect_psd("init_cov", init_cov);
  expect_psd("Q1", Q1);
  expect_psd("Q2", Q2);
  if (!is_symmetric(R)) throw ConfigError("R: not symmetric");
  if (nu > 0 && !is_pd(R)) throw ConfigError("R: not positive definite");
  if (horizon < 1) throw ConfigError("horizon: must be a positive integer");
}

}  // namespace qflqg
