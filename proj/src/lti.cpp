#include "wfl/lti.hpp"

#include <cmath>
#include <string>

#include "internal.hpp"
#include "wfl/linalg.hpp"

namespace wfl {

namespace {

std::string shape(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

LtiSystem::LtiSystem(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  const Eigen::Index n = A_.rows();
  const Eigen::Index m = D_.cols();
  const Eigen::Index p = D_.rows();
  if (m < 1 || p < 1) throw InputError("system needs m >= 1 and p >= 1, got D " + shape(D_));
  if (A_.cols() != n) throw InputError("A must be square, got " + shape(A_));
  if (B_.rows() != n || B_.cols() != m) {
    throw InputError("B must be " + std::to_string(n) + "x" + std::to_string(m) + ", got " +
                     shape(B_));
  }
  if (C_.rows() != p || C_.cols() != n) {
    throw InputError("C must be " + std::to_string(p) + "x" + std::to_string(n) + ", got " +
                     shape(C_));
  }
  if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !D_.allFinite()) {
    throw InputError("system matrices contain non-finite entries");
  }
}

LtiSystem LtiSystem::Static(Matrix D) {
  const Eigen::Index m = D.cols();
  const Eigen::Index p = D.rows();
  return LtiSystem(Matrix(0, 0), Matrix(0, m), Matrix(p, 0), std::move(D));
}

Trajectory simulate(const LtiSystem& sys, const Vector& x0, const Signal& u) {
  if (u.dim() != sys.m()) {
    throw InputError("simulate: input has dimension " + std::to_string(u.dim()) + ", system has m = " +
                     std::to_string(sys.m()));
  }
  if (x0.size() != sys.n()) {
    throw InputError("simulate: x0 has dimension " + std::to_string(x0.size()) + ", system has n = " +
                     std::to_string(sys.n()));
  }
  const Eigen::Index N = u.length();
  Matrix x(sys.n(), N);
  Matrix y(sys.p(), N);
  Vector xk = x0;
  for (Eigen::Index k = 0; k < N; ++k) {
    x.col(k) = xk;
    y.col(k).noalias() = sys.C() * xk + sys.D() * u.sample(k);
    if (k + 1 < N) {
      Vector next = sys.A() * xk + sys.B() * u.sample(k);
      xk = std::move(next);
    }
  }
  return {Signal(std::move(x)), Signal(std::move(y))};
}

Matrix MarkovParameters::stacked() const {
  if (blocks.empty()) return {};
  const Eigen::Index p = blocks.front().rows();
  const Eigen::Index m = blocks.front().cols();
  Matrix out(p, m * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    out.middleCols(m * static_cast<Eigen::Index>(j), m) = blocks[j];
  }
  return out;
}

MarkovParameters markov_parameters(const LtiSystem& sys) {
  return markov_parameters(sys, sys.n() + 1);
}

MarkovParameters markov_parameters(const LtiSystem& sys, Eigen::Index count) {
  MarkovParameters out;
  if (count < 1) return out;
  out.blocks.reserve(static_cast<std::size_t>(count));
  out.blocks.push_back(sys.D());
  Matrix AjB = sys.B();  // A^{j-1} B
  for (Eigen::Index j = 1; j < count; ++j) {
    out.blocks.push_back(sys.C() * AjB);
    AjB = sys.A() * AjB;
  }
  return out;
}

Matrix AnnihilatingPolynomial::evaluate(const Matrix& A) const {
  const Eigen::Index n = degree();
  // Horner in the order d_0 A^n + d_1 A^{n-1} + ... + d_n.
  Matrix acc = Matrix::Zero(A.rows(), A.cols());
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  for (Eigen::Index j = 0; j <= n; ++j) {
    acc = acc * A + d(j) * I;
  }
  return acc;
}

AnnihilatingPolynomial characteristic_polynomial(const Matrix& A) {
  if (A.rows() != A.cols()) throw InputError("characteristic_polynomial: A must be square");
  const Eigen::Index n = A.rows();
  // Monic coefficients c with det(zI - A) = z^n + c_{n-1} z^{n-1} + ... + c_0.
  // coeffs is [c_0, c_1, ..., c_{n-1}, 1] = [d_n, ..., d_1, d_0] before scaling.
  Vector coeffs = Vector::Zero(n + 1);
  coeffs(n) = 1.0;
  Matrix Mk = Matrix::Zero(n, n);
  const Matrix I = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Mk = A * Mk + coeffs(n - k + 1) * I;
    coeffs(n - k) = -(A * Mk).trace() / static_cast<double>(k);
  }
  // Adding +0.0 clears negative zeros so exact cases print and compare cleanly.
  return {(coeffs / coeffs.norm()).array() + 0.0};
}

AnnihilatingPolynomial annihilating_polynomial(const LtiSystem& sys) {
  return characteristic_polynomial(sys.A());
}

Matrix controllability_matrix(const Matrix& A, const Matrix& B) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Matrix out(n, n * m);
  if (n == 0) return out;
  out.leftCols(m) = B;
  for (Eigen::Index i = 1; i < n; ++i) {
    out.middleCols(m * i, m) = A * out.middleCols(m * (i - 1), m);
  }
  return out;
}

Matrix controllability_matrix(const LtiSystem& sys) {
  return controllability_matrix(sys.A(), sys.B());
}

Matrix observability_matrix(const Matrix& A, const Matrix& C, Eigen::Index depth) {
  const Eigen::Index p = C.rows();
  Matrix out(p * depth, A.cols());
  if (depth == 0) return out;
  out.topRows(p) = C;
  for (Eigen::Index i = 1; i < depth; ++i) {
    out.middleRows(p * i, p) = out.middleRows(p * (i - 1), p) * A;
  }
  return out;
}

bool is_controllable(const LtiSystem& sys, double rank_rtol) {
  return numerical_rank(controllability_matrix(sys), rank_rtol) == sys.n();
}

bool is_output_reachable(const LtiSystem& sys, double rank_rtol) {
  return numerical_rank(markov_parameters(sys).stacked(), rank_rtol) == sys.p();
}

namespace detail {

// State-output extension without the n >= 1 guard; build_Z uses it for
// static systems where the extension is just phi_k = u_k.
LtiSystem extend_unchecked(const LtiSystem& sys) {
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  Matrix Ct = Matrix::Zero(n + m, n);
  Ct.topRows(n).setIdentity();
  Matrix Dt = Matrix::Zero(n + m, m);
  Dt.bottomRows(m).setIdentity();
  return LtiSystem(sys.A(), sys.B(), std::move(Ct), std::move(Dt));
}

}  // namespace detail

LtiSystem extend_to_state_output(const LtiSystem& sys) {
  if (sys.n() == 0) throw InputError("extend_to_state_output: system has no state");
  return detail::extend_unchecked(sys);
}

Eigen::Index relative_degree(const LtiSystem& sys, double tol) {
  const MarkovParameters mp = markov_parameters(sys);
  if (tol < 0.0) tol = 1e-10 * std::max(1.0, mp.stacked().norm());
  for (std::size_t r = 0; r < mp.blocks.size(); ++r) {
    if (mp.blocks[r].norm() > tol) return static_cast<Eigen::Index>(r);
  }
  return sys.n() + 1;
}

}  // namespace wfl
