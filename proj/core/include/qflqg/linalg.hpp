#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qflqg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimensions, definiteness, config fields).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A computation could not be carried out reliably.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The exact scenario-tree solver was asked for an instance beyond its limits.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

/// (X + Xᵀ) / 2
Matrix symmetrize(const Matrix& x);

/// Smallest eigenvalue of the symmetric part of `x`.
double min_eigenvalue(const Matrix& x);

/// Scale used for relative PSD / symmetry tolerances: max(1, max |x_ij|).
double magnitude(const Matrix& x);

bool is_symmetric(const Matrix& x, double rel_tol = 1e-10);

/// Symmetric with min eigenvalue >= -rel_tol * magnitude(x).
bool is_psd(const Matrix& x, double rel_tol = 1e-10);

/// Symmetric with min eigenvalue > rel_tol * magnitude(x).
bool is_pd(const Matrix& x, double rel_tol = 1e-12);

/// Symmetric square root factor S with S Sᵀ = x, valid for singular PSD x.
Matrix psd_sqrt(const Matrix& x);

bool all_finite(const Matrix& x);

std::string shape_string(const Matrix& x);

}  // namespace qflqg
