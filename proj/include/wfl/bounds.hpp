#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfl/lti.hpp"

namespace wfl {

enum class Verdict { kHolds, kFails, kInapplicable };

const char* to_string(Verdict v);

/// Kind of statement a report certifies: a PSD ordering lhs >= rhs, a
/// full-rank (order-1 excitation) statement about lhs alone, or an algebraic
/// identity whose residual is reported as the margin.
enum class ClaimKind { kDominance, kRank, kIdentity };

const char* to_string(ClaimKind k);

/// One intermediate quantity replayed while checking a bound, e.g. a PSD
/// margin of a proof step or the residual of an identity.
struct ChainStep {
  std::string name;
  double value = 0.0;
  bool ok = true;
};

struct ReportContext {
  Eigen::Index n = 0, m = 0, p = 0;
  Eigen::Index length = 0;
  Eigen::Index depth = 0;
  Eigen::Index relative_degree = 0;
  std::optional<unsigned long long> seed;
};

struct BoundReport {
  std::string name;
  ClaimKind kind = ClaimKind::kDominance;
  Verdict verdict = Verdict::kInapplicable;
  Matrix lhs;
  Matrix rhs;
  /// lambda_min(lhs - rhs) for dominance claims, lambda_min(lhs) for rank
  /// claims, the residual for identities.
  double margin = 0.0;
  /// Dominance: verdict is margin >= -threshold. Identity: residual <= threshold.
  double threshold = 0.0;
  std::string note;
  std::vector<ChainStep> chain;
  ReportContext context;
  double elapsed_ms = 0.0;
};

struct IoResidual {
  double max_residual = 0.0;
  /// 1 + max_k ||y_k||_inf; the residual is judged against 1e-8 * scale.
  double scale = 1.0;
};

/// max over k in [n, N-1] of ||M u_[k-n,k] - [y_{k-n} ... y_k] d||_2.
/// Throws InputError when N < n + 1.
IoResidual verify_io_representation(const LtiSystem& sys, const Vector& x0, const Signal& u);

/// Gram of the filtered input {M u_[k-n,k]}, k = n..N-1.
Matrix filtered_input_gram(const LtiSystem& sys, const Signal& u);

/// Output PE of order 1 from excitation of {M u_[k-n,k]}:
///   sum_k y_k y_k^T >= K_u / (n+1).
/// Without K_u the default is 0.9 x the filtered-input Gram.
BoundReport verify_filtered_input_bound(const LtiSystem& sys, const Vector& x0, const Signal& u,
                            const std::optional<Matrix>& K_u = std::nullopt,
                            const Tolerances& tol = {});

/// Output PE of order 1 from an input that is K_u-PE of order n+1:
///   sum_k y_k y_k^T >= M K_u M^T / (n+1).
BoundReport verify_output_excitation_bound(const LtiSystem& sys, const Vector& x0, const Signal& u,
                              const std::optional<Matrix>& K_u = std::nullopt,
                              const Tolerances& tol = {});

/// lambda_min(K_u) sigma_min(Dbar)^2 Gamma Gamma^T / (n+1).
Matrix directional_bound_output(const LtiSystem& sys, const Matrix& K_u);

/// lambda_min(Gammabar K_u Gammabar^T) I_p / (n+1). The eigenvalue is snapped
/// to exactly 0 when Gammabar K_u Gammabar^T is numerically rank deficient.
Matrix directional_bound_input(const LtiSystem& sys, const Matrix& K_u,
                               double rank_rtol = Tolerances{}.rank_rtol);

enum class DirectionalBound { kOutput, kInput };

/// Chain check bound <= M K_u M^T/(n+1) <= output Gram for one of the two
/// directional bounds.
BoundReport verify_directional_chain(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                     DirectionalBound which,
                                     const std::optional<Matrix>& K_u = std::nullopt,
                                     const Tolerances& tol = {});

/// Relaxed excitation for systems with relative degree r: the first N-r
/// input samples being PE of order n+1-r suffices for a PE output.
/// `claimed_r`, when given, must match the relative degree or the report is
/// inapplicable.
BoundReport verify_relaxed_excitation(const LtiSystem& sys, const Vector& x0, const Signal& u,
                              std::optional<Eigen::Index> claimed_r = std::nullopt,
                              const Tolerances& tol = {});

/// Gram of the state-input data matrix [H_1(x_[0,N-L]); H_L(u)].
Matrix state_input_gram(const Signal& x, const Signal& u, Eigen::Index depth);

/// Lower bound Z K_u Z^T / (n+1) on the state-input Gram for an input that is
/// K_u-PE of order L+n. Throws InputError for a K_u of the wrong size.
BoundReport verify_state_input_bound(const LtiSystem& sys, const Vector& x0, const Signal& u,
                            Eigen::Index depth,
                            const std::optional<Matrix>& K_u = std::nullopt,
                            const Tolerances& tol = {});

/// Model-error tolerant form using an estimate Zhat with ||Zhat - Z||_2 < eps:
///   Gram >= Zhat K_u Zhat^T / (2(n+1)) - eps^2 sigma_max(K_u) I / (n+1).
/// Throws InputError for eps <= 0.
BoundReport verify_robust_state_input_bound(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                Eigen::Index depth, const std::optional<Matrix>& K_u,
                                const Matrix& Zhat, double eps,
                                const Tolerances& tol = {});

/// Smallest scalar k_u with k_u M M^T / (n+1) >= K_y. Any input that is
/// (k_u I)-PE of order n+1 then yields an output Gram >= K_y.
/// Throws InputError when M is rank deficient or K_y has the wrong size.
double design_input_gain(const LtiSystem& sys, const Matrix& K_y,
                         double rank_rtol = Tolerances{}.rank_rtol);

}  // namespace wfl
