#include "wfl/fundamental.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>

#include "wfl/linalg.hpp"
#include "wfl/pe.hpp"
#include "wfl/structmat.hpp"

namespace wfl {

Matrix state_input_matrix(const Signal& x, const Signal& u, Eigen::Index depth) {
  if (x.length() != u.length()) {
    throw InputError("state and input trajectories differ in length (" +
                     std::to_string(x.length()) + " vs " + std::to_string(u.length()) + ")");
  }
  const HankelMatrix hu = hankel(u, depth);
  const Eigen::Index cols = hu.data.cols();
  Matrix out(x.dim() + hu.data.rows(), cols);
  out.topRows(x.dim()) = x.samples().leftCols(cols);
  out.bottomRows(hu.data.rows()) = hu.data;
  return out;
}

Matrix io_data_matrix(const Signal& u, const Signal& y, Eigen::Index depth) {
  if (y.length() != u.length()) {
    throw InputError("input and output trajectories differ in length");
  }
  const HankelMatrix hu = hankel(u, depth);
  const HankelMatrix hy = hankel(y, depth);
  Matrix out(hu.data.rows() + hy.data.rows(), hu.data.cols());
  out << hu.data, hy.data;
  return out;
}

RankConditionResult rank_condition_check(const Signal& x, const Signal& u, Eigen::Index depth,
                                         double rank_rtol) {
  const Matrix S = state_input_matrix(x, u, depth);
  RankConditionResult out;
  out.required = u.dim() * depth + x.dim();
  out.rank = numerical_rank(S, rank_rtol);
  out.holds = out.rank == out.required;
  // sigma_min over the required rank; zero when the matrix is too wide to
  // have that many singular values.
  const Vector s = singular_values(S);
  out.sigma_min = s.size() >= out.required && out.required > 0 ? s(out.required - 1) : 0.0;
  return out;
}

TrajectorySpaceBasis trajectory_space_basis(const LtiSystem& sys, Eigen::Index depth) {
  if (depth < 1) throw InputError("trajectory_space_basis: depth must be positive");
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const Eigen::Index p = sys.p();
  const MarkovParameters markov = markov_parameters(sys, depth);

  TrajectorySpaceBasis out;
  out.depth = depth;
  out.observability = observability_matrix(sys.A(), sys.C(), depth);
  out.toeplitz = Matrix::Zero(p * depth, m * depth);
  for (Eigen::Index i = 0; i < depth; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      out.toeplitz.block(p * i, m * j, p, m) = markov.blocks[static_cast<std::size_t>(i - j)];
    }
  }
  out.W = Matrix::Zero((m + p) * depth, m * depth + n);
  out.W.topLeftCorner(m * depth, m * depth).setIdentity();
  out.W.bottomLeftCorner(p * depth, m * depth) = out.toeplitz;
  out.W.bottomRightCorner(p * depth, n) = out.observability;
  return out;
}

namespace {

Matrix unit_scaled(const Matrix& a) {
  const double s = sigma_max(a);
  return s > 0.0 ? Matrix(a / s) : a;
}

}  // namespace

ImageEqualityResult image_equality_check(const LtiSystem& sys, const Signal& u, const Signal& y,
                                         Eigen::Index depth, double rank_rtol) {
  const Matrix H = unit_scaled(io_data_matrix(u, y, depth));
  const Matrix W = unit_scaled(trajectory_space_basis(sys, depth).W);
  Matrix joint(H.rows(), H.cols() + W.cols());
  joint << H, W;
  ImageEqualityResult out;
  out.rank_data = numerical_rank(H, rank_rtol);
  out.rank_model = numerical_rank(W, rank_rtol);
  out.rank_joint = numerical_rank(joint, rank_rtol);
  out.equal = out.rank_data == out.rank_model && out.rank_model == out.rank_joint;
  return out;
}

ImageEqualityResult image_equality_check(const LtiSystem& sys, const Vector& x0,
                                         const Signal& u, Eigen::Index depth,
                                         double rank_rtol) {
  const Trajectory traj = simulate(sys, x0, u);
  return image_equality_check(sys, u, traj.y, depth, rank_rtol);
}

Parametrization parametrize(const Signal& u_data, const Signal& y_data, Eigen::Index depth,
                            const Vector& ubar, const Vector& ybar) {
  const Matrix H = io_data_matrix(u_data, y_data, depth);
  if (ubar.size() != u_data.dim() * depth || ybar.size() != y_data.dim() * depth) {
    throw InputError("parametrize: target window has the wrong length");
  }
  Vector target(ubar.size() + ybar.size());
  target << ubar, ybar;
  Eigen::BDCSVD<Matrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Parametrization out;
  out.g = svd.solve(target);
  out.residual = (H * out.g - target).norm();
  return out;
}

CounterexampleReport counterexample_run(Eigen::Index length, std::vector<Vector> probes) {
  if (length < 3) throw InputError("counterexample_run: length must be at least 3");
  if (probes.empty()) {
    probes = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(-3.0, 5.0)};
  }

  CounterexampleReport rep;
  rep.length = length;
  rep.A = (Matrix(2, 2) << 0.0, 0.0, 1.0, 0.0).finished();
  rep.B = (Matrix(2, 1) << 1.0, 0.0).finished();
  rep.C = Matrix::Identity(2, 2);
  rep.D = Matrix::Zero(2, 1);
  const LtiSystem sys(rep.A, rep.B, rep.C, rep.D);
  const Eigen::Index n = sys.n();

  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  rep.d = d.coeffs;
  rep.M = build_M(markov_parameters(sys), d);
  Matrix impulse = Matrix::Zero(1, length);
  impulse(0, 0) = 1.0;
  rep.u = Signal(impulse);

  rep.outputs_pe = true;
  for (Vector& x0 : probes) {
    if (x0.size() != n) throw InputError("counterexample_run: probes must be 2-vectors");
    CounterexampleProbe probe{x0, simulate(sys, x0, rep.u).y, 0};
    probe.output_rank = numerical_rank(probe.y.samples());
    rep.outputs_pe = rep.outputs_pe && probe.output_rank == sys.p();
    rep.probes.push_back(std::move(probe));
  }

  rep.first_filtered = rep.M * rep.u.window(0, n);
  rep.filtered_gram = Matrix::Zero(sys.p(), sys.p());
  for (Eigen::Index k = n; k < length; ++k) {
    const Vector f = rep.M * rep.u.window(k - n, k);
    rep.filtered_gram.noalias() += f * f.transpose();
    if (k > n) rep.later_filtered_max = std::max(rep.later_filtered_max, f.norm());
  }
  rep.filtered_rank = numerical_rank(rep.filtered_gram);
  rep.filtered_pe = rep.filtered_rank == sys.p();

  // Direction a with a^T M u_[k-n,k] = 0 for all k: the null eigenvector of
  // the filtered Gram.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rep.filtered_gram);
  rep.direction = es.eigenvectors().col(0);
  Eigen::Index lead = 0;
  rep.direction.cwiseAbs().maxCoeff(&lead);
  if (rep.direction(lead) < 0.0) rep.direction = -rep.direction;

  const Matrix aC = rep.direction.transpose() * rep.C;
  const Matrix obs = observability_matrix(rep.A, aC, n);
  rep.projected_obs_rank = numerical_rank(obs);
  rep.reduced_order = rep.projected_obs_rank;

  // Try to zero a^T y_0 ... a^T y_{n-1} by the choice of x0:
  //   [a^T y_0; ...; a^T y_{n-1}] = O x0 + Tu u_[0,n-1].
  Vector forced = Vector::Zero(n);
  const MarkovParameters mk = markov_parameters(sys, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      forced(i) += (rep.direction.transpose() * mk.blocks[static_cast<std::size_t>(i - j)] *
                    rep.u.sample(j))(0);
    }
  }
  Eigen::BDCSVD<Matrix> svd(obs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  rep.zeroing_state = svd.solve(-forced);
  rep.zeroing_residual = (obs * rep.zeroing_state + forced).norm();
  const Signal y0 = simulate(sys, rep.zeroing_state, rep.u).y;
  rep.zeroed_output = rep.direction.dot(y0.sample(0));
  rep.next_output = rep.direction.dot(y0.sample(1));

  rep.claim_falsified = rep.outputs_pe && !rep.filtered_pe;
  rep.open_questions = {
      "Which system classes make (A, a^T C) observable for every direction a that annihilates "
      "the filtered input, whatever the input?",
      "For which systems is the reduced order below n, so that a less exciting input already "
      "gives the same output excitation?",
      "What follows for the necessity of the input excitation conditions of the output bound and "
      "of the state-input bound?",
  };
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_vec(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v(i));
  }
  return s + "]";
}

}  // namespace

std::string counterexample_summary(const CounterexampleReport& r) {
  std::ostringstream os;
  os << "Necessity counterexample (N = " << r.length << ", impulse input)\n";
  os << "  A = [[0, 0], [1, 0]], B = [1; 0], C = I2, D = 0\n";
  os << "  d = " << fmt_vec(r.d) << "\n";
  os << "  M = [" << fmt_vec(r.M.row(0).transpose()) << "; " << fmt_vec(r.M.row(1).transpose())
     << "]\n\n";
  os << "  " << std::left << std::setw(14) << "x0" << std::setw(13) << "rank H1(y)"
     << "y_0 .. y_3\n";
  for (const auto& p : r.probes) {
    os << "  " << std::setw(14) << fmt_vec(p.x0) << std::setw(13) << p.output_rank;
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(4, p.y.length()); ++k) {
      os << fmt_vec(p.y.sample(k)) << " ";
    }
    os << "\n";
  }
  os << std::right;
  os << "\n  M u_[0,2]              = " << fmt_vec(r.first_filtered) << "\n";
  os << "  max_k>=3 |M u_[k-2,k]| = " << fmt(r.later_filtered_max) << "\n";
  os << "  rank of filtered Gram  = " << r.filtered_rank << " (needs " << r.probes.front().y.dim()
     << ")\n";
  os << "  output PE for all x0   : " << (r.outputs_pe ? "yes" : "no") << "\n";
  os << "  filtered input PE      : " << (r.filtered_pe ? "yes" : "no") << "\n\n";
  os << "  annihilating direction a = " << fmt_vec(r.direction) << "\n";
  os << "  rank [a^T C; a^T C A]    = " << r.projected_obs_rank << " < n, reduced order "
     << r.reduced_order << "\n";
  os << "  x0 = " << fmt_vec(r.zeroing_state) << " gives a^T y_0 = " << fmt(r.zeroed_output)
     << " but a^T y_1 = " << fmt(r.next_output) << "\n\n";
  os << "  verdict: " << (r.claim_falsified ? "Claim 1 falsified" : "claim not falsified") << "\n";
  os << "\n  open questions (not resolved here):\n";
  for (const auto& q : r.open_questions) os << "   - " << q << "\n";
  return os.str();
}

}  // namespace wfl
