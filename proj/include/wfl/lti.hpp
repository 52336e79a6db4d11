#pragma once

#include <vector>

#include "wfl/types.hpp"

namespace wfl {

/// Discrete-time LTI system
///   x_{k+1} = A x_k + B u_k,   y_k = C x_k + D u_k
/// with n states, m inputs and p outputs. n = 0 (static gain y = D u) is
/// allowed; m and p must be positive.
class LtiSystem {
 public:
  /// Validates shapes and finiteness; throws InputError otherwise.
  LtiSystem(Matrix A, Matrix B, Matrix C, Matrix D);

  /// Static system y = D u.
  static LtiSystem Static(Matrix D);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Matrix& D() const { return D_; }

  Eigen::Index n() const { return A_.rows(); }
  Eigen::Index m() const { return B_.cols(); }
  Eigen::Index p() const { return C_.rows(); }

 private:
  Matrix A_, B_, C_, D_;
};

struct Trajectory {
  Signal x;  // n x N
  Signal y;  // p x N
};

/// Runs the state recursion from x0 over the full input horizon.
Trajectory simulate(const LtiSystem& sys, const Vector& x0, const Signal& u);

/// Markov parameters Gamma_0 = D, Gamma_j = C A^{j-1} B.
struct MarkovParameters {
  std::vector<Matrix> blocks;

  /// Horizontal concatenation [Gamma_0 Gamma_1 ... Gamma_n].
  Matrix stacked() const;
  Eigen::Index order() const { return static_cast<Eigen::Index>(blocks.size()) - 1; }
};

/// The first n + 1 Markov parameters.
MarkovParameters markov_parameters(const LtiSystem& sys);

/// The first `count` Markov parameters (count may exceed n + 1).
MarkovParameters markov_parameters(const LtiSystem& sys, Eigen::Index count);

/// Coefficients of d(z) = sum_j d_j z^{n-j}, stored as [d_n, ..., d_1, d_0]
/// with unit Euclidean norm, d_0 != 0 and d(A) = 0.
struct AnnihilatingPolynomial {
  Vector coeffs;

  Eigen::Index degree() const { return coeffs.size() - 1; }
  /// Coefficient d_j of z^{n-j}.
  double d(Eigen::Index j) const { return coeffs(degree() - j); }
  /// Evaluates sum_j d_j A^{n-j}.
  Matrix evaluate(const Matrix& A) const;
};

/// Normalized characteristic polynomial of A (Faddeev-LeVerrier).
/// Returns [1] for n = 0.
AnnihilatingPolynomial annihilating_polynomial(const LtiSystem& sys);
AnnihilatingPolynomial characteristic_polynomial(const Matrix& A);

/// [B AB ... A^{n-1}B], n x nm.
Matrix controllability_matrix(const LtiSystem& sys);
Matrix controllability_matrix(const Matrix& A, const Matrix& B);

/// [C; CA; ...; CA^{depth-1}], (p depth) x n.
Matrix observability_matrix(const Matrix& A, const Matrix& C, Eigen::Index depth);

bool is_controllable(const LtiSystem& sys, double rank_rtol = Tolerances{}.rank_rtol);

/// Full row rank of the stacked Markov parameters [D CB ... CA^{n-1}B].
bool is_output_reachable(const LtiSystem& sys, double rank_rtol = Tolerances{}.rank_rtol);

/// System with output phi_k = [x_k; u_k]. Throws InputError for n = 0.
LtiSystem extend_to_state_output(const LtiSystem& sys);

/// Smallest r with ||Gamma_r|| > tol; n + 1 when Gamma_0..Gamma_n all vanish.
/// A negative tol selects 1e-10 * max(1, ||Gamma||_F).
Eigen::Index relative_degree(const LtiSystem& sys, double tol = -1.0);

}  // namespace wfl
