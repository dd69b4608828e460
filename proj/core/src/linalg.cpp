#include "qflqg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qflqg {

Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

double min_eigenvalue(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(x), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double magnitude(const Matrix& x) {
  if (x.size() == 0) return 1.0;
  return std::max(1.0, x.cwiseAbs().maxCoeff());
}

bool is_symmetric(const Matrix& x, double rel_tol) {
  if (x.rows() != x.cols()) return false;
  return (x - x.transpose()).cwiseAbs().maxCoeff() <= rel_tol * magnitude(x);
}

bool is_psd(const Matrix& x, double rel_tol) {
  return is_symmetric(x) && min_eigenvalue(x) >= -rel_tol * magnitude(x);
}

bool is_pd(const Matrix& x, double rel_tol) {
  return is_symmetric(x) && min_eigenvalue(x) > rel_tol * magnitude(x);
}

Matrix psd_sqrt(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(x));
  Vector d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

bool all_finite(const Matrix& x) { return x.allFinite(); }

std::string shape_string(const Matrix& x) {
  return std::to_string(x.rows()) + "x" + std::to_string(x.cols());
}

}  // namespace qflqg
