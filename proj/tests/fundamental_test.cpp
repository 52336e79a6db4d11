#include <gtest/gtest.h>

#include "support.hpp"
#include "wfl/fundamental.hpp"
#include "wfl/linalg.hpp"
#include "wfl/pe.hpp"

namespace wfl {
namespace {

using test::random_matrix;
using test::random_signal;
using test::random_system;
using test::shift_register;

// Block-diagonal system whose second mode is observable but not reachable.
LtiSystem unreachable_mode() {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 0.5;
  A(1, 1) = -0.7;
  return LtiSystem(A, (Matrix(2, 1) << 1, 0).finished(), (Matrix(1, 2) << 1, 1).finished(),
                   Matrix::Zero(1, 1));
}

TEST(StateInputMatrix, Layout) {
  const Signal u = random_signal(1, 8, 1);
  const Signal x = random_signal(2, 8, 2);
  const Matrix S = state_input_matrix(x, u, 3);
  ASSERT_EQ(S.rows(), 5);
  ASSERT_EQ(S.cols(), 6);
  EXPECT_EQ(Vector(S.col(2)), (Vector(5) << x.sample(2), u.window(2, 4)).finished());
  EXPECT_THROW(state_input_matrix(random_signal(2, 7, 3), u, 3), InputError);
}

TEST(RankCondition, ZeroData) {
  const RankConditionResult r = rank_condition_check(Signal::Zero(2, 10), Signal::Zero(1, 10), 2);
  EXPECT_EQ(r.rank, 0);
  EXPECT_FALSE(r.holds);
}

// Shift register, impulse input, x0 = 0: the states are e1, e2 after the
// impulse, so [x; u] over six samples has columns [0;0;1], [1;0;0], [0;1;0].
TEST(RankCondition, ShiftRegisterImpulse) {
  Matrix u = Matrix::Zero(1, 6);
  u(0, 0) = 1.0;
  const Trajectory t = simulate(shift_register(), Vector::Zero(2), Signal(u));
  const Matrix S = state_input_matrix(t.x, Signal(u), 1);
  Matrix expected = Matrix::Zero(3, 6);
  expected(2, 0) = 1.0;
  expected(0, 1) = 1.0;
  expected(1, 2) = 1.0;
  EXPECT_EQ(S, expected);
  const RankConditionResult r = rank_condition_check(t.x, Signal(u), 1);
  EXPECT_EQ(r.rank, 3);
  EXPECT_TRUE(r.holds);
  // Too short to see both states.
  const RankConditionResult short_run =
      rank_condition_check(t.x.slice(0, 2), Signal(u).slice(0, 2), 1);
  EXPECT_FALSE(short_run.holds);
}

TEST(RankCondition, PeInputOnControllableSystem) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LtiSystem s = random_system(2, 1, 1, seed);
    const Signal u = random_signal(1, 60, seed + 1);
    ASSERT_TRUE(pe_order_check(u, 5));
    const Trajectory t = simulate(s, random_matrix(2, 1, seed + 2), u);
    const RankConditionResult r = rank_condition_check(t.x, u, 3);
    EXPECT_TRUE(r.holds) << "seed " << seed;
    EXPECT_GT(r.sigma_min, 0.0);
  }
}

TEST(TrajectorySpace, BasisMapsInitialStateAndInputs) {
  const LtiSystem s = random_system(3, 2, 2, 4);
  const Eigen::Index L = 4;
  const TrajectorySpaceBasis b = trajectory_space_basis(s, L);
  const Vector x0 = random_matrix(3, 1, 5);
  const Signal u = random_signal(2, L, 6);
  const Signal y = simulate(s, x0, u).y;
  Vector coords(2 * L + 3);
  coords << u.window(0, L - 1), x0;
  Vector expected(4 * L);
  expected << u.window(0, L - 1), y.window(0, L - 1);
  EXPECT_LE((b.W * coords - expected).norm(), 1e-12 * (1.0 + expected.norm()));
}

TEST(ImageEquality, ControllableSystemsWithPeInputs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Eigen::Index n = 1 + seed % 4, m = 1 + seed % 2, p = 1 + seed % 3, L = 1 + seed % 3;
    const LtiSystem s = random_system(n, m, p, seed);
    const Signal u = random_signal(m, 20 * (L + n), seed + 1);
    const Vector x0 = random_matrix(n, 1, seed + 2);
    const Trajectory t = simulate(s, x0, u);
    const RankConditionResult rank = rank_condition_check(t.x, u, L);
    EXPECT_TRUE(rank.holds) << "seed " << seed;
    EXPECT_TRUE(image_equality_check(s, x0, u, L).equal) << "seed " << seed;
  }
}

TEST(ImageEquality, UnreachableModeBreaksEquality) {
  const Signal u = random_signal(1, 80, 3);
  const ImageEqualityResult r = image_equality_check(unreachable_mode(), Vector::Zero(2), u, 3);
  EXPECT_FALSE(r.equal);
  EXPECT_LT(r.rank_data, r.rank_model);
  const Trajectory t = simulate(unreachable_mode(), Vector::Zero(2), u);
  EXPECT_FALSE(rank_condition_check(t.x, u, 3).holds);
}

TEST(ImageEquality, ZeroData) {
  const LtiSystem s = random_system(2, 1, 1, 9);
  EXPECT_FALSE(image_equality_check(s, Vector::Zero(2), Signal::Zero(1, 30), 2).equal);
}

// Data columns are themselves trajectories.
TEST(ImageEquality, DataColumnsAreTrajectories) {
  const LtiSystem s = random_system(3, 1, 2, 12);
  const Eigen::Index L = 3;
  const Signal u = random_signal(1, 40, 1);
  const Trajectory t = simulate(s, random_matrix(3, 1, 2), u);
  const Matrix H = io_data_matrix(u, t.y, L);
  for (Eigen::Index j = 0; j < H.cols(); ++j) {
    Matrix uw(1, L);
    for (Eigen::Index k = 0; k < L; ++k) uw(0, k) = H(k, j);
    const Signal yw = simulate(s, t.x.sample(j), Signal(uw)).y;
    EXPECT_LE((yw.window(0, L - 1) - H.col(j).tail(2 * L)).norm(), 1e-10 * (1.0 + H.norm()));
  }
}

TEST(Parametrize, DataColumnReproducesItself) {
  const LtiSystem s = random_system(2, 1, 1, 3);
  const Signal u = random_signal(1, 40, 4);
  const Signal y = simulate(s, random_matrix(2, 1, 5), u).y;
  const Matrix H = io_data_matrix(u, y, 3);
  const Parametrization g = parametrize(u, y, 3, H.col(4).head(3), H.col(4).tail(3));
  EXPECT_LE(g.residual, 1e-10);
}

TEST(Parametrize, FreshTrajectory) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LtiSystem s = random_system(3, 2, 2, seed);
    const Eigen::Index L = 4;
    const Signal u = random_signal(2, 100, seed + 1);
    const Signal y = simulate(s, random_matrix(3, 1, seed + 2), u).y;
    const Signal ub = random_signal(2, L, seed + 3);
    const Signal yb = simulate(s, random_matrix(3, 1, seed + 4), ub).y;
    const Parametrization g = parametrize(u, y, L, ub.window(0, L - 1), yb.window(0, L - 1));
    EXPECT_LE(g.residual, 1e-8) << "seed " << seed;
  }
}

TEST(Parametrize, PerturbedTargetMatchesProjectionDistance) {
  const LtiSystem s = random_system(2, 1, 1, 21);
  const Eigen::Index L = 3;
  const Signal u = random_signal(1, 60, 22);
  const Signal y = simulate(s, random_matrix(2, 1, 23), u).y;
  const Signal ub = random_signal(1, L, 24);
  Vector yb = simulate(s, random_matrix(2, 1, 25), ub).y.window(0, L - 1);
  yb(1) += 1.0;
  const Parametrization g = parametrize(u, y, L, ub.window(0, L - 1), yb);
  // Distance of the target to the column space, from an orthonormal basis.
  const Matrix H = io_data_matrix(u, y, L);
  Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeThinU);
  const Eigen::Index r = numerical_rank(H);
  const Matrix U = svd.matrixU().leftCols(r);
  Vector target(2 * L);
  target << ub.window(0, L - 1), yb;
  const double distance = (target - U * (U.transpose() * target)).norm();
  EXPECT_GT(g.residual, 1e-3);
  EXPECT_NEAR(g.residual, distance, 1e-8);
}

TEST(Counterexample, PrintedValues) {
  const CounterexampleReport r = counterexample_run();
  EXPECT_EQ(r.d, Eigen::Vector3d(0, 0, 1));
  EXPECT_EQ(r.M, (Matrix(2, 3) << 0, 1, 0, 1, 0, 0).finished());
  EXPECT_EQ(r.first_filtered, Eigen::Vector2d(0, 1));
  EXPECT_EQ(r.later_filtered_max, 0.0);
  EXPECT_EQ(r.filtered_gram, (Matrix(2, 2) << 0, 0, 0, 1).finished());
  EXPECT_EQ(r.filtered_rank, 1);
  ASSERT_EQ(r.probes.size(), 3u);
  for (const auto& p : r.probes) {
    EXPECT_EQ(p.output_rank, 2);
    Matrix expected = Matrix::Zero(2, 6);
    expected(0, 0) = p.x0(0);
    expected(1, 0) = p.x0(1);
    expected(0, 1) = 1.0;
    expected(1, 1) = p.x0(0);
    expected(1, 2) = 1.0;
    EXPECT_EQ(p.y.samples(), expected);
  }
  EXPECT_TRUE(r.outputs_pe);
  EXPECT_FALSE(r.filtered_pe);
  EXPECT_TRUE(r.claim_falsified);
}

TEST(Counterexample, ObservabilityGap) {
  const CounterexampleReport r = counterexample_run();
  EXPECT_EQ(r.direction, Eigen::Vector2d(1, 0));
  EXPECT_EQ(r.projected_obs_rank, 1);
  EXPECT_EQ(r.reduced_order, 1);
  EXPECT_EQ(r.zeroed_output, 0.0);
  EXPECT_EQ(r.next_output, 1.0);
  EXPECT_EQ(r.open_questions.size(), 3u);
  const std::string summary = counterexample_summary(r);
  EXPECT_NE(summary.find("Claim 1 falsified"), std::string::npos);
}

TEST(Counterexample, AnyInitialStateAndLength) {
  std::vector<Vector> probes;
  for (std::uint64_t seed = 0; seed < 10; ++seed) probes.push_back(random_matrix(2, 1, seed));
  probes.push_back(Eigen::Vector2d(1, 0));
  probes.push_back(Eigen::Vector2d(0, 1));
  const CounterexampleReport r = counterexample_run(12, probes);
  EXPECT_TRUE(r.claim_falsified);
  for (const auto& p : r.probes) EXPECT_EQ(p.output_rank, 2);
  EXPECT_THROW(counterexample_run(2), InputError);
  EXPECT_THROW(counterexample_run(6, {Vector::Zero(3)}), InputError);
}

}  // namespace
}  // namespace wfl
