#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when arguments violate an operation's preconditions
/// (dimension mismatch, too-short data, non-symmetric bound, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a random instance cannot be produced within the attempt budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical tolerances shared by every rank and PSD-ordering decision.
///
/// A singular value counts toward the rank iff
///   sigma_i > rank_rtol * sigma_max * max(rows, cols).
/// A PSD comparison A >= B passes iff
///   lambda_min(sym(A - B)) >= -psd_tol * (|tr A| + |tr B| + 1).
struct Tolerances {
  double rank_rtol = 1e-10;
  double psd_tol = 1e-9;
};

/// Finite multivariate sequence. Column k holds sample u_k, so the sample
/// dimension is rows() and the length is cols(). A zero sample dimension is
/// allowed so that state trajectories of static systems are representable.
class Signal {
 public:
  Signal() = default;
  explicit Signal(Matrix samples);

  /// Builds a signal of `length` zero samples of dimension `dim`.
  static Signal Zero(Eigen::Index dim, Eigen::Index length);

  Eigen::Index dim() const { return samples_.rows(); }
  Eigen::Index length() const { return samples_.cols(); }

  const Matrix& samples() const { return samples_; }
  auto sample(Eigen::Index k) const { return samples_.col(k); }

  /// Stacked window u_[a, b] = [u_a; ...; u_b], inclusive bounds.
  Vector window(Eigen::Index a, Eigen::Index b) const;

  /// Sub-sequence {u_k} for k in [first, first + count).
  Signal slice(Eigen::Index first, Eigen::Index count) const;

  /// Exact (bitwise on values) equality including shape.
  friend bool operator==(const Signal& a, const Signal& b);

 private:
  Matrix samples_;
};

}  // namespace wfl
