#include "wfl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "internal.hpp"
#include "wfl/fundamental.hpp"
#include "wfl/linalg.hpp"
#include "wfl/pe.hpp"
#include "wfl/structmat.hpp"

namespace wfl {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kFails:
      return "fails";
    case Verdict::kInapplicable:
      return "inapplicable";
  }
  return "unknown";
}

const char* to_string(ClaimKind k) {
  switch (k) {
    case ClaimKind::kDominance:
      return "dominance";
    case ClaimKind::kRank:
      return "rank";
    case ClaimKind::kIdentity:
      return "identity";
  }
  return "unknown";
}

namespace {

constexpr double kIdentityRtol = 1e-8;

ReportContext make_context(const LtiSystem& sys, const Signal& u, Eigen::Index depth) {
  ReportContext c;
  c.n = sys.n();
  c.m = sys.m();
  c.p = sys.p();
  c.length = u.length();
  c.depth = depth;
  return c;
}

void require_length(const Signal& u, Eigen::Index needed, const char* what) {
  if (u.length() < needed) {
    throw InputError(std::string(what) + ": trajectory of length " + std::to_string(u.length()) +
                     " is shorter than the required " + std::to_string(needed));
  }
}

Matrix resolve_bound(const std::optional<Matrix>& K_u, const Matrix& achieved, const char* what) {
  if (!K_u) return detail::kDefaultBoundFraction * achieved;
  if (K_u->rows() != achieved.rows() || K_u->cols() != achieved.cols()) {
    throw InputError(std::string(what) + ": K_u must be " + std::to_string(achieved.rows()) +
                     "x" + std::to_string(achieved.cols()) + ", got " +
                     std::to_string(K_u->rows()) + "x" + std::to_string(K_u->cols()));
  }
  if (!is_symmetric(*K_u)) throw InputError(std::string(what) + ": K_u is not symmetric");
  return *K_u;
}

ChainStep psd_step(std::string name, const Matrix& upper, const Matrix& lower, double psd_tol) {
  const PsdComparison cmp = psd_dominates(upper, lower, psd_tol);
  return {std::move(name), cmp.margin, cmp.dominates};
}

ChainStep identity_step(std::string name, double residual, double scale) {
  return {std::move(name), residual, residual <= kIdentityRtol * scale};
}

bool chain_ok(const BoundReport& r) {
  return std::all_of(r.chain.begin(), r.chain.end(), [](const ChainStep& s) { return s.ok; });
}

void settle_dominance(BoundReport& report, double psd_tol) {
  const PsdComparison cmp = psd_dominates(report.lhs, report.rhs, psd_tol);
  report.margin = cmp.margin;
  report.threshold = cmp.threshold;
  report.verdict = cmp.dominates && chain_ok(report) ? Verdict::kHolds : Verdict::kFails;
}

Matrix output_gram(const Signal& y) {
  return symmetrize(y.samples() * y.samples().transpose());
}

// Columns M u_[k-n,k] for k = n..N-1.
Matrix filtered_input(const Matrix& M, const Signal& u, Eigen::Index n) {
  const Eigen::Index count = u.length() - n;
  Matrix out(M.rows(), count);
  for (Eigen::Index k = n; k < u.length(); ++k) {
    out.col(k - n) = M * u.window(k - n, k);
  }
  return out;
}

// Columns [y_{k-n} ... y_k] d for k = n..N-1.
Matrix output_combination(const Signal& y, const AnnihilatingPolynomial& d) {
  const Eigen::Index n = d.degree();
  const Eigen::Index count = y.length() - n;
  Matrix out = Matrix::Zero(y.dim(), count);
  for (Eigen::Index k = n; k < y.length(); ++k) {
    for (Eigen::Index i = 0; i <= n; ++i) {
      out.col(k - n) += d.coeffs(i) * y.sample(k - n + i);
    }
  }
  return out;
}

// sum_{k=n}^{N-1} sum_{j=0}^{n} y_{k-j} y_{k-j}^T.
Matrix windowed_output_sum(const Signal& y, Eigen::Index n) {
  Matrix out = Matrix::Zero(y.dim(), y.dim());
  for (Eigen::Index k = n; k < y.length(); ++k) {
    for (Eigen::Index j = 0; j <= n; ++j) {
      out.noalias() += y.sample(k - j) * y.sample(k - j).transpose();
    }
  }
  return out;
}

// The shared tail of the output bounds: filtered input Gram equals the
// combined-output Gram, which is dominated by the windowed sum and then by
// (n+1) times the output Gram.
void replay_output_chain(BoundReport& report, const Matrix& filtered, const Matrix& combined,
                         const Signal& y, Eigen::Index n, double psd_tol) {
  const double scale = 1.0 + std::max(filtered.cwiseAbs().maxCoeff(), y.samples().cwiseAbs().maxCoeff());
  report.chain.push_back(
      identity_step("M u window equals output combination", (filtered - combined).norm(), scale));
  const Matrix combined_gram = symmetrize(combined * combined.transpose());
  const Matrix windowed = windowed_output_sum(y, n);
  report.chain.push_back(psd_step("combination Gram <= windowed output sum", windowed,
                                  combined_gram, psd_tol));
  report.chain.push_back(psd_step("windowed output sum <= (n+1) output Gram",
                                  static_cast<double>(n + 1) * report.lhs, windowed, psd_tol));
}

}  // namespace

IoResidual verify_io_representation(const LtiSystem& sys, const Vector& x0, const Signal& u) {
  require_length(u, sys.n() + 1, "verify_io_representation");
  const Trajectory traj = simulate(sys, x0, u);
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  const Matrix M = build_M(markov_parameters(sys), d);
  const Matrix lhs = filtered_input(M, u, sys.n());
  const Matrix rhs = output_combination(traj.y, d);
  IoResidual out;
  out.max_residual = (lhs - rhs).colwise().norm().maxCoeff();
  out.scale = 1.0 + traj.y.samples().cwiseAbs().maxCoeff();
  return out;
}

Matrix filtered_input_gram(const LtiSystem& sys, const Signal& u) {
  require_length(u, sys.n() + 1, "filtered_input_gram");
  const Matrix f = filtered_input(build_M(sys), u, sys.n());
  return symmetrize(f * f.transpose());
}

BoundReport verify_filtered_input_bound(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                        const std::optional<Matrix>& K_u, const Tolerances& tol) {
  const detail::Stopwatch clock;
  const Eigen::Index n = sys.n();
  require_length(u, n + 1, "verify_filtered_input_bound");

  BoundReport report;
  report.name = "filtered-input-excitation";
  report.context = make_context(sys, u, 1);

  const Trajectory traj = simulate(sys, x0, u);
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  const Matrix M = build_M(markov_parameters(sys), d);
  const Matrix filtered = filtered_input(M, u, n);
  const Matrix filtered_gram = symmetrize(filtered * filtered.transpose());
  const Matrix K = resolve_bound(K_u, filtered_gram, "verify_filtered_input_bound");

  report.lhs = output_gram(traj.y);
  report.rhs = K / static_cast<double>(n + 1);

  const ChainStep pre = psd_step("K_u <= filtered input Gram", filtered_gram, K, tol.psd_tol);
  report.chain.push_back(pre);
  replay_output_chain(report, filtered, output_combination(traj.y, d), traj.y, n, tol.psd_tol);

  settle_dominance(report, tol.psd_tol);
  const bool filtered_pe = numerical_rank(filtered, tol.rank_rtol) == sys.p();
  if (!filtered_pe || !pre.ok) {
    report.verdict = Verdict::kInapplicable;
    report.note = filtered_pe ? "filtered input Gram does not dominate K_u"
                              : "filtered input {M u_[k-n,k]} is not PE of order 1";
  }
  report.elapsed_ms = clock.elapsed_ms();
  return report;
}

BoundReport verify_output_excitation_bound(const LtiSystem& sys, const Vector& x0,
                                           const Signal& u, const std::optional<Matrix>& K_u,
                                           const Tolerances& tol) {
  const detail::Stopwatch clock;
  const Eigen::Index n = sys.n();
  require_length(u, n + 1, "verify_output_excitation_bound");

  BoundReport report;
  report.name = "output-excitation";
  report.context = make_context(sys, u, 1);

  const Matrix input_gram = pe_gram(u, n + 1);
  const Matrix K = resolve_bound(K_u, input_gram, "verify_output_excitation_bound");

  const Trajectory traj = simulate(sys, x0, u);
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  const Matrix M = build_M(markov_parameters(sys), d);
  const Matrix filtered = filtered_input(M, u, n);
  const Matrix filtered_gram = symmetrize(filtered * filtered.transpose());

  report.lhs = output_gram(traj.y);
  report.rhs = symmetrize(M * K * M.transpose()) / static_cast<double>(n + 1);

  const ChainStep pre = psd_step("K_u <= input Gram of order n+1", input_gram, K, tol.psd_tol);
  report.chain.push_back(pre);
  report.chain.push_back(psd_step("M K_u M^T <= filtered input Gram", filtered_gram,
                                  symmetrize(M * K * M.transpose()), tol.psd_tol));
  replay_output_chain(report, filtered, output_combination(traj.y, d), traj.y, n, tol.psd_tol);

  settle_dominance(report, tol.psd_tol);
  if (!is_output_reachable(sys, tol.rank_rtol)) {
    report.verdict = Verdict::kInapplicable;
    report.note = "system is not output reachable";
  } else if (!pre.ok) {
    report.verdict = Verdict::kInapplicable;
    report.note = "input is not K_u-PE of order n+1";
  }
  report.elapsed_ms = clock.elapsed_ms();
  return report;
}

Matrix directional_bound_output(const LtiSystem& sys, const Matrix& K_u) {
  const Eigen::Index n = sys.n();
  const Eigen::Index size = sys.m() * (n + 1);
  if (K_u.rows() != size || K_u.cols() != size) {
    throw InputError("directional_bound_output: K_u must be " + std::to_string(size) + "x" +
                     std::to_string(size));
  }
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  const Matrix gamma = markov_parameters(sys).stacked();
  const double lambda = std::max(0.0, lambda_min_sym(K_u));
  const double s = sigma_min(build_Dbar(d));
  return lambda * s * s / static_cast<double>(n + 1) * symmetrize(gamma * gamma.transpose());
}

Matrix directional_bound_input(const LtiSystem& sys, const Matrix& K_u, double rank_rtol) {
  const Eigen::Index n = sys.n();
  const Eigen::Index size = sys.m() * (n + 1);
  if (K_u.rows() != size || K_u.cols() != size) {
    throw InputError("directional_bound_input: K_u must be " + std::to_string(size) + "x" +
                     std::to_string(size));
  }
  const Matrix gammabar = build_Gammabar(markov_parameters(sys));
  const Matrix G = symmetrize(gammabar * K_u * gammabar.transpose());
  double lambda = 0.0;
  if (numerical_rank(G, rank_rtol) == G.rows()) lambda = std::max(0.0, lambda_min_sym(G));
  return lambda / static_cast<double>(n + 1) * Matrix::Identity(sys.p(), sys.p());
}

BoundReport verify_directional_chain(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                     DirectionalBound which, const std::optional<Matrix>& K_u,
                                     const Tolerances& tol) {
  const detail::Stopwatch clock;
  const Eigen::Index n = sys.n();
  require_length(u, n + 1, "verify_directional_chain");

  BoundReport report;
  report.name = which == DirectionalBound::kOutput ? "output-directional" : "input-directional";
  report.context = make_context(sys, u, 1);

  const Matrix input_gram = pe_gram(u, n + 1);
  const Matrix K = resolve_bound(K_u, input_gram, "verify_directional_chain");
  const Matrix M = build_M(sys);
  const Matrix output_bound = symmetrize(M * K * M.transpose()) / static_cast<double>(n + 1);
  const Trajectory traj = simulate(sys, x0, u);
  const Matrix gram = output_gram(traj.y);

  report.lhs = output_bound;
  report.rhs = which == DirectionalBound::kOutput ? directional_bound_output(sys, K)
                                                  : directional_bound_input(sys, K, tol.rank_rtol);
  const ChainStep pre = psd_step("K_u <= input Gram of order n+1", input_gram, K, tol.psd_tol);
  report.chain.push_back(pre);
  report.chain.push_back(psd_step("directional bound <= M K_u M^T/(n+1)", output_bound,
                                  report.rhs, tol.psd_tol));
  report.chain.push_back(psd_step("M K_u M^T/(n+1) <= output Gram", gram, output_bound,
                                  tol.psd_tol));
  settle_dominance(report, tol.psd_tol);
  if (!is_output_reachable(sys, tol.rank_rtol)) {
    report.verdict = Verdict::kInapplicable;
    report.note = "system is not output reachable";
  } else if (!pre.ok) {
    report.verdict = Verdict::kInapplicable;
    report.note = "input is not K_u-PE of order n+1";
  }
  report.elapsed_ms = clock.elapsed_ms();
  return report;
}

BoundReport verify_relaxed_excitation(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                      std::optional<Eigen::Index> claimed_r,
                                      const Tolerances& tol) {
  const detail::Stopwatch clock;
  const Eigen::Index n = sys.n();
  const Eigen::Index N = u.length();
  require_length(u, n + 1, "verify_relaxed_excitation");

  BoundReport report;
  report.name = "relaxed-excitation";
  report.kind = ClaimKind::kRank;
  const Eigen::Index r = relative_degree(sys);
  report.context = make_context(sys, u, 1);
  report.context.relative_degree = r;

  const Trajectory traj = simulate(sys, x0, u);
  report.lhs = output_gram(traj.y);
  report.rhs = Matrix::Zero(sys.p(), sys.p());
  report.margin = lambda_min_sym(report.lhs);

  auto inapplicable = [&](std::string why) {
    report.verdict = Verdict::kInapplicable;
    report.note = std::move(why);
    report.elapsed_ms = clock.elapsed_ms();
    return report;
  };
  if (claimed_r && *claimed_r != r) {
    return inapplicable("Markov parameters do not have relative degree " +
                        std::to_string(*claimed_r) + " (found " + std::to_string(r) + ")");
  }
  if (!is_output_reachable(sys, tol.rank_rtol)) {
    return inapplicable("system is not output reachable");
  }

  // Identity M u_[k-n,k] = Mbar_r u_[k-n,k-r] along the data.
  const Matrix M = build_M(sys);
  const RelaxedM relaxed = build_relaxed_M(sys, r);
  double residual = 0.0;
  for (Eigen::Index k = n; k < N; ++k) {
    const Vector full = M * u.window(k - n, k);
    const Vector reduced = relaxed.M * u.window(k - n, k - r);
    residual = std::max(residual, (full - reduced).norm());
  }
  const double scale = std::max(1.0, M.norm() * u.samples().cwiseAbs().maxCoeff());
  report.chain.push_back({"M u window equals relaxed window", residual, residual <= 1e-10 * scale});

  // The last r input samples cannot reach the output.
  if (r >= 1) {
    Matrix perturbed = u.samples();
    perturbed.rightCols(r).array() += 1.0;
    const Trajectory alt = simulate(sys, x0, Signal(perturbed));
    const double change = (alt.y.samples() - traj.y.samples()).cwiseAbs().maxCoeff();
    const double yscale = 1.0 + traj.y.samples().cwiseAbs().maxCoeff();
    report.chain.push_back({"output change from last r samples", change, change <= 1e-12 * yscale});
  }

  const Eigen::Index order = n + 1 - r;
  const Eigen::Index prefix = N - r;
  if (prefix < order || !pe_order_check(u.slice(0, prefix), order, tol.rank_rtol)) {
    return inapplicable("first N-r input samples are not PE of order n+1-r");
  }

  const bool output_pe = numerical_rank(traj.y.samples(), tol.rank_rtol) == sys.p();
  report.verdict = output_pe && chain_ok(report) ? Verdict::kHolds : Verdict::kFails;
  if (!output_pe) report.note = "output is not PE of order 1";
  report.elapsed_ms = clock.elapsed_ms();
  return report;
}

Matrix state_input_gram(const Signal& x, const Signal& u, Eigen::Index depth) {
  const Matrix s = state_input_matrix(x, u, depth);
  return symmetrize(s * s.transpose());
}

namespace {

struct StateInputPieces {
  Trajectory traj;
  Matrix data;  // [H_1(x_[0,N-L]); H_L(u)]
  Matrix K;
  Matrix input_gram;
  ZMatrix z;
};

StateInputPieces state_input_pieces(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                    Eigen::Index depth, const std::optional<Matrix>& K_u,
                                    const Tolerances& tol, const char* what) {
  if (depth < 1) throw InputError(std::string(what) + ": depth must be positive");
  const Eigen::Index n = sys.n();
  const Eigen::Index size = sys.m() * (depth + n);
  if (K_u && (K_u->rows() != size || K_u->cols() != size)) {
    throw InputError(std::string(what) + ": K_u must be " + std::to_string(size) + "x" +
                     std::to_string(size));
  }
  require_length(u, depth + n, what);
  StateInputPieces out{simulate(sys, x0, u), {}, {}, pe_gram(u, depth + n),
                       build_Z(sys, depth, tol.rank_rtol)};
  out.data = state_input_matrix(out.traj.x, u, depth);
  out.K = resolve_bound(K_u, out.input_gram, what);
  return out;
}

}  // namespace

BoundReport verify_state_input_bound(const LtiSystem& sys, const Vector& x0, const Signal& u,
                                     Eigen::Index depth, const std::optional<Matrix>& K_u,
                                     const Tolerances& tol) {
  const detail::Stopwatch clock;
  const StateInputPieces pieces =
      state_input_pieces(sys, x0, u, depth, K_u, tol, "verify_state_input_bound");
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const Eigen::Index N = u.length();
  const Matrix& S = pieces.data;
  const Matrix& Z = pieces.z.Z;

  BoundReport report;
  report.name = "state-input-excitation";
  report.context = make_context(sys, u, depth);
  report.lhs = symmetrize(S * S.transpose());
  report.rhs = symmetrize(Z * pieces.K * Z.transpose()) / static_cast<double>(n + 1);

  const ChainStep pre =
      psd_step("K_u <= input Gram of order L+n", pieces.input_gram, pieces.K, tol.psd_tol);
  report.chain.push_back(pre);
  report.chain.push_back(psd_step("Z K_u Z^T <= Z (input Gram) Z^T",
                                  symmetrize(Z * pieces.input_gram * Z.transpose()),
                                  symmetrize(Z * pieces.K * Z.transpose()), tol.psd_tol));

  // Window identities for k = n..N-L. Column j of S is [x_j; u_[j,j+L-1]], so
  // [Phi_k; U_k] is the block of columns k-n..k.
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  const Matrix TI = kron(pieces.z.T, Matrix::Identity(m, m));
  double toeplitz_residual = 0.0;
  double z_residual = 0.0;
  Matrix combined_gram = Matrix::Zero(S.rows(), S.rows());
  for (Eigen::Index k = n; k <= N - depth; ++k) {
    const Vector v = S.middleCols(k - n, n + 1) * d.coeffs;
    combined_gram.noalias() += v * v.transpose();
    z_residual = std::max(z_residual, (v - Z * u.window(k - n, k + depth - 1)).norm());
    if (depth > 1) {
      const Vector Ud = v.tail(m * (depth - 1));
      toeplitz_residual =
          std::max(toeplitz_residual, (Ud - TI * u.window(k - n + 1, k + depth - 1)).norm());
    }
  }
  const double scale = 1.0 + S.cwiseAbs().maxCoeff();
  if (depth > 1) {
    report.chain.push_back(identity_step("U_k d equals (T (x) I) u window", toeplitz_residual, scale));
  }
  report.chain.push_back(identity_step("[Phi_k; U_k] d equals Z u window", z_residual, scale));
  report.chain.push_back(psd_step("combination Gram <= (n+1) state-input Gram",
                                  static_cast<double>(n + 1) * report.lhs, combined_gram,
                                  tol.psd_tol));

  settle_dominance(report, tol.psd_tol);
  if (!is_controllable(sys, tol.rank_rtol)) {
    report.verdict = Verdict::kInapplicable;
    report.note = "(A, B) is not controllable";
  } else if (!pre.ok) {
    report.verdict = Verdict::kInapplicable;
    report.note = "input is not K_u-PE of order L+n";
  }
  report.elapsed_ms = clock.elapsed_ms();
  return report;
}

BoundReport verify_robust_state_input_bound(const LtiSystem& sys, const Vector& x0,
                                            const Signal& u, Eigen::Index depth,
                                            const std::optional<Matrix>& K_u, const Matrix& Zhat,
                                            double eps, const Tolerances& tol) {
  const detail::Stopwatch clock;
  if (!(eps > 0.0)) throw InputError("verify_robust_state_input_bound: eps must be positive");
  const StateInputPieces pieces =
      state_input_pieces(sys, x0, u, depth, K_u, tol, "verify_robust_state_input_bound");
  const Matrix& Z = pieces.z.Z;
  if (Zhat.rows() != Z.rows() || Zhat.cols() != Z.cols()) {
    throw InputError("verify_robust_state_input_bound: Zhat must match the shape of Z");
  }
  const Eigen::Index n = sys.n();
  const double n1 = static_cast<double>(n + 1);

  BoundReport report;
  report.name = "robust-state-input-excitation";
  report.context = make_context(sys, u, depth);
  report.lhs = symmetrize(pieces.data * pieces.data.transpose());
  const double kmax = sigma_max(pieces.K);
  report.rhs = symmetrize(Zhat * pieces.K * Zhat.transpose()) / (2.0 * n1) -
               eps * eps * kmax / n1 * Matrix::Identity(Z.rows(), Z.rows());

  const double model_error = sigma_max(Zhat - Z);
  const ChainStep pre =
      psd_step("K_u <= input Gram of order L+n", pieces.input_gram, pieces.K, tol.psd_tol);
  report.chain.push_back(pre);
  report.chain.push_back({"||Zhat - Z||_2", model_error, model_error < eps});
  const Matrix exact = symmetrize(Z * pieces.K * Z.transpose()) / n1;
  report.chain.push_back(psd_step("robust bound <= Z K_u Z^T/(n+1)", exact, report.rhs,
                                  tol.psd_tol));
  report.chain.push_back(psd_step("Z K_u Z^T/(n+1) <= state-input Gram", report.lhs, exact,
                                  tol.psd_tol));

  settle_dominance(report, tol.psd_tol);
  if (!is_controllable(sys, tol.rank_rtol)) {
    report.verdict = Verdict::kInapplicable;
    report.note = "(A, B) is not controllable";
  } else if (!(model_error < eps)) {
    report.verdict = Verdict::kInapplicable;
    report.note = "||Zhat - Z||_2 >= eps";
  } else if (!pre.ok) {
    report.verdict = Verdict::kInapplicable;
    report.note = "input is not K_u-PE of order L+n";
  } else if (lambda_max_sym(report.rhs) <= 0.0) {
    report.note = "weak certificate: bound is negative semidefinite";
  }
  report.elapsed_ms = clock.elapsed_ms();
  return report;
}

double design_input_gain(const LtiSystem& sys, const Matrix& K_y, double rank_rtol) {
  const Eigen::Index p = sys.p();
  if (K_y.rows() != p || K_y.cols() != p) {
    throw InputError("design_input_gain: K_y must be " + std::to_string(p) + "x" +
                     std::to_string(p));
  }
  if (!is_symmetric(K_y)) throw InputError("design_input_gain: K_y is not symmetric");
  const Matrix M = build_M(sys);
  if (numerical_rank(M, rank_rtol) < p) {
    throw InputError("design_input_gain: M is rank deficient, no finite gain exists");
  }
  const Matrix W = inverse_sqrt_spd(symmetrize(M * M.transpose()));
  const double gain =
      static_cast<double>(sys.n() + 1) * lambda_max_sym(W * symmetrize(K_y) * W);
  return std::max(0.0, gain);
}

}  // namespace wfl
