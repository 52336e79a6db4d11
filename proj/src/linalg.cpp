#include "wfl/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace wfl {

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector(0);
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

Eigen::Index numerical_rank(const Matrix& a, double rank_rtol) {
  const Vector s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double threshold =
      rank_rtol * s(0) * static_cast<double>(std::max(a.rows(), a.cols()));
  return (s.array() > threshold).count();
}

double sigma_min(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

double sigma_max(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double lambda_min_sym(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("lambda_min of a non-square matrix");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double lambda_max_sym(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("lambda_max of a non-square matrix");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double psd_threshold(const Matrix& a, const Matrix& b, double psd_tol) {
  return psd_tol * (std::abs(a.trace()) + std::abs(b.trace()) + 1.0);
}

PsdComparison psd_dominates(const Matrix& a, const Matrix& b, double psd_tol) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError("psd_dominates: shape mismatch");
  }
  PsdComparison out;
  out.margin = lambda_min_sym(a - b);
  out.threshold = psd_threshold(a, b, psd_tol);
  out.dominates = out.margin >= -out.threshold;
  return out;
}

Matrix inverse_sqrt_spd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.info() != Eigen::Success || (a.size() > 0 && es.eigenvalues()(0) <= 0.0)) {
    throw InputError("inverse_sqrt_spd: matrix is not positive definite");
  }
  return es.operatorInverseSqrt();
}

}  // namespace wfl
