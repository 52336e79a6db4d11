#pragma once

#include <string>
#include <vector>

#include "wfl/lti.hpp"

namespace wfl {

/// [H_1(x_[0,N-L]); H_L(u)], (n + mL) x (N - L + 1). Column k is
/// [x_k; u_[k,k+L-1]]. Throws InputError on length mismatch or N < L.
Matrix state_input_matrix(const Signal& x, const Signal& u, Eigen::Index depth);

/// [H_L(u); H_L(y)], (m + p)L x (N - L + 1).
Matrix io_data_matrix(const Signal& u, const Signal& y, Eigen::Index depth);

struct RankConditionResult {
  bool holds = false;
  Eigen::Index rank = 0;
  Eigen::Index required = 0;
  double sigma_min = 0.0;
};

/// rank [H_1(x_[0,N-L]); H_L(u)] == mL + n.
RankConditionResult rank_condition_check(const Signal& x, const Signal& u, Eigen::Index depth,
                                         double rank_rtol = Tolerances{}.rank_rtol);

/// Explicit parametrization of all length-L trajectories:
///   W = [I_{mL} 0; T_L O_L],   [u; y] = W [u; x0].
struct TrajectorySpaceBasis {
  Matrix W;
  Matrix observability;  // O_L, pL x n
  Matrix toeplitz;       // T_L, pL x mL
  Eigen::Index depth = 0;
};

TrajectorySpaceBasis trajectory_space_basis(const LtiSystem& sys, Eigen::Index depth);

struct ImageEqualityResult {
  bool equal = false;
  Eigen::Index rank_data = 0;
  Eigen::Index rank_model = 0;
  Eigen::Index rank_joint = 0;
};

/// Column-space equality of the data matrix [H_L(u); H_L(y)] and W, decided by
/// rank(data) == rank(W) == rank([data | W]) on norm-balanced blocks.
ImageEqualityResult image_equality_check(const LtiSystem& sys, const Vector& x0,
                                         const Signal& u, Eigen::Index depth,
                                         double rank_rtol = Tolerances{}.rank_rtol);
ImageEqualityResult image_equality_check(const LtiSystem& sys, const Signal& u,
                                         const Signal& y, Eigen::Index depth,
                                         double rank_rtol = Tolerances{}.rank_rtol);

struct Parametrization {
  Vector g;
  /// ||H g - [ubar; ybar]||_2 for the minimum-norm least-squares g.
  double residual = 0.0;
};

/// Expresses a length-L input-output pair as a combination of data columns.
Parametrization parametrize(const Signal& u_data, const Signal& y_data, Eigen::Index depth,
                            const Vector& ubar, const Vector& ybar);

struct CounterexampleProbe {
  Vector x0;
  Signal y;
  Eigen::Index output_rank = 0;
};

/// Reproduction of the failed necessity claim: a system and input for which
/// the output is PE of order 1 for every initial state while the filtered
/// input {M u_[k-n,k]} is not.
struct CounterexampleReport {
  Eigen::Index length = 0;
  Matrix A, B, C, D;
  Vector d;
  Matrix M;
  Signal u;
  std::vector<CounterexampleProbe> probes;
  Vector first_filtered;            // M u_[0,2]
  double later_filtered_max = 0.0;  // max_k>=3 ||M u_[k-2,k]||
  Matrix filtered_gram;
  Eigen::Index filtered_rank = 0;
  bool outputs_pe = false;
  bool filtered_pe = false;

  // Why the classical argument breaks: the annihilating direction a and the
  // observability of (A, a^T C).
  Vector direction;
  Eigen::Index projected_obs_rank = 0;
  Eigen::Index reduced_order = 0;
  Vector zeroing_state;        // x0 with a^T y_0 = 0
  double zeroed_output = 0.0;  // a^T y_0
  double next_output = 0.0;    // a^T y_1, cannot also be zeroed
  double zeroing_residual = 0.0;  // min_x0 ||[a^T y_0; a^T y_1]||

  bool claim_falsified = false;
  std::vector<std::string> open_questions;
};

/// Default length 6 and initial-state probes {[0;0], [1;2], [-3;5]}.
CounterexampleReport counterexample_run(Eigen::Index length = 6,
                                        std::vector<Vector> probes = {});

std::string counterexample_summary(const CounterexampleReport& report);

}  // namespace wfl
