#pragma once

#include <optional>

#include "wfl/types.hpp"

namespace wfl {

/// Depth-L Hankel matrix of a q-dimensional signal of length N:
/// qL x (N - L + 1), column j is the window u_[j, j+L-1].
struct HankelMatrix {
  Matrix data;
  Eigen::Index depth = 0;
  Eigen::Index sample_dim = 0;
  Eigen::Index source_length = 0;
};

/// Throws InputError when N < L or L < 1.
HankelMatrix hankel(const Signal& u, Eigen::Index depth);

/// Rank-based persistence of excitation: rank H_L(u) == qL.
bool pe_order_check(const Signal& u, Eigen::Index depth,
                    double rank_rtol = Tolerances{}.rank_rtol);

/// H_L(u) H_L(u)^T via the matrix product.
Matrix pe_gram(const Signal& u, Eigen::Index depth);

/// Same Gram accumulated window by window: sum_k u_[k,k+L-1] u_[k,k+L-1]^T.
Matrix pe_gram_summation(const Signal& u, Eigen::Index depth);

/// Quantitative excitation certificate for one signal and depth.
struct PeCertificate {
  Eigen::Index order = 0;
  Matrix gram;
  std::optional<Matrix> bound;
  /// lambda_min(gram - bound) if a bound is present, else lambda_min(gram).
  double margin = 0.0;
  double threshold = 0.0;
  bool holds = false;
  /// Relative gap between the product and summation forms of the Gram.
  double gram_consistency = 0.0;
};

/// Checks H_L(u) H_L(u)^T >= K. Both Gram forms are computed and
/// cross-checked. Throws InputError when K is not a symmetric qL x qL matrix.
PeCertificate kpe_check(const Signal& u, Eigen::Index depth, const Matrix& bound,
                        double psd_tol = Tolerances{}.psd_tol);

/// Certificate without a bound; `holds` reports strict positivity of the
/// Gram in the numerical-rank sense.
PeCertificate pe_certificate(const Signal& u, Eigen::Index depth,
                             const Tolerances& tol = {});

}  // namespace wfl
