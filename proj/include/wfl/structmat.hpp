#pragma once

#include <optional>
#include <string>

#include "wfl/lti.hpp"

namespace wfl {

/// M = [M_n ... M_1 M_0] with M_j = sum_{q=0}^{j} d_{j-q} Gamma_q, p x m(n+1).
/// Satisfies M u_[k-n,k] = [y_{k-n} ... y_k] d along every trajectory.
Matrix build_M(const LtiSystem& sys);
Matrix build_M(const MarkovParameters& markov, const AnnihilatingPolynomial& d);

/// M = (d^T (x) I_p) Gammabar.
Matrix build_M_via_gammabar(const MarkovParameters& markov, const AnnihilatingPolynomial& d);
/// M = Gamma (Dbar (x) I_m).
Matrix build_M_via_dbar(const MarkovParameters& markov, const AnnihilatingPolynomial& d);

/// (n+1) x (n+1) anti-triangular Hankel of coefficients,
/// entry (i, j) = d_{n-i-j} for i + j <= n, else 0.
Matrix build_Dbar(const AnnihilatingPolynomial& d);

/// Block-lower-triangular Toeplitz [Gamma_0 0 ...; Gamma_1 Gamma_0 ...; ...].
Matrix build_Gammabar(const MarkovParameters& markov);

/// Same Toeplitz built from Gamma_r ... Gamma_n only (n + 1 - r blocks).
/// Throws InputError for r outside [0, n].
Matrix build_Gammabar_relaxed(const MarkovParameters& markov, Eigen::Index r);

/// (L-1) x (L+n-1) banded Toeplitz whose rows are shifted copies of
/// [d_n ... d_0]. Empty (0 rows) for L = 1.
Matrix build_T(const AnnihilatingPolynomial& d, Eigen::Index depth);

struct ZMatrix {
  Matrix Z;
  /// M of the state-output extension, (n+m) x m(n+1).
  Matrix M_ext;
  Matrix T;
  /// Set when the row rank of Z falls short of (n+m) + m(L-1).
  std::optional<std::string> rank_warning;
};

/// Block matrix [M_ext 0; 0 T (x) I_m] of size ((n+m) + m(L-1)) x m(L+n),
/// where M_ext belongs to the system with output [x_k; u_k]. Accepts n = 0.
ZMatrix build_Z(const LtiSystem& sys, Eigen::Index depth,
                double rank_rtol = Tolerances{}.rank_rtol);

struct RelaxedM {
  Matrix M;     // p x m(n+1-r)
  Vector d;     // [d_{n-r} ... d_0]
  Eigen::Index r = 0;
};

/// Relaxed representation for systems whose first r Markov parameters
/// vanish: M u_[k-n,k] = Mbar_r u_[k-n,k-r]. Throws InputError when r > n.
RelaxedM build_relaxed_M(const LtiSystem& sys, Eigen::Index r);

/// All structured matrices for one system (Z, T only when a depth is given).
struct StructuredSet {
  AnnihilatingPolynomial d;
  MarkovParameters markov;
  Matrix M;
  Matrix Dbar;
  Matrix Gammabar;
  std::optional<ZMatrix> z;
  std::optional<RelaxedM> relaxed;
};

StructuredSet build_structured_set(const LtiSystem& sys, std::optional<Eigen::Index> depth,
                                   std::optional<Eigen::Index> relaxation = std::nullopt);

}  // namespace wfl
