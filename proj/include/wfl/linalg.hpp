#pragma once

#include <utility>

#include "wfl/types.hpp"

namespace wfl {

/// Singular values in decreasing order (empty for empty matrices).
Vector singular_values(const Matrix& a);

/// Scale-aware numerical rank, see Tolerances::rank_rtol.
Eigen::Index numerical_rank(const Matrix& a, double rank_rtol = Tolerances{}.rank_rtol);

/// Smallest of the min(rows, cols) singular values; 0 for empty matrices.
double sigma_min(const Matrix& a);
double sigma_max(const Matrix& a);

/// Smallest / largest eigenvalue of the symmetric part (a + a^T) / 2.
double lambda_min_sym(const Matrix& a);
double lambda_max_sym(const Matrix& a);

Matrix symmetrize(const Matrix& a);

bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

/// Dense Kronecker product a (x) b.
Matrix kron(const Matrix& a, const Matrix& b);

struct PsdComparison {
  bool dominates = false;
  /// lambda_min(sym(a - b)).
  double margin = 0.0;
  /// The absolute threshold the margin was compared against (>= 0).
  double threshold = 0.0;
};

/// PSD ordering test a >= b with the trace-scaled tolerance of Tolerances.
/// Throws InputError on shape mismatch.
PsdComparison psd_dominates(const Matrix& a, const Matrix& b,
                            double psd_tol = Tolerances{}.psd_tol);

/// Trace-scaled PSD threshold psd_tol * (|tr a| + |tr b| + 1).
double psd_threshold(const Matrix& a, const Matrix& b, double psd_tol);

/// Symmetric inverse square root of a positive definite matrix.
Matrix inverse_sqrt_spd(const Matrix& a);

}  // namespace wfl
