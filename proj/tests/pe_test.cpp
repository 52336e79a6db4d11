#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "support.hpp"
#include "wfl/linalg.hpp"
#include "wfl/pe.hpp"

namespace wfl {
namespace {

using test::random_matrix;
using test::random_signal;

Signal scalar(std::initializer_list<double> values) {
  Matrix m(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) m(0, k++) = v;
  return Signal(m);
}

TEST(Signal, WindowAndSlice) {
  Matrix data(2, 4);
  data << 1, 2, 3, 4,
          5, 6, 7, 8;
  const Signal s(data);
  EXPECT_EQ(s.window(1, 2), (Vector(4) << 2, 6, 3, 7).finished());
  EXPECT_EQ(s.slice(2, 2).samples(), data.rightCols(2));
  EXPECT_THROW(s.window(2, 4), InputError);
  EXPECT_THROW(s.window(-1, 0), InputError);
  EXPECT_THROW(s.slice(3, 2), InputError);
  EXPECT_THROW(Signal(Matrix(1, 0)), InputError);
}

TEST(Signal, EqualityChecksShape) {
  EXPECT_FALSE(Signal(Matrix::Zero(1, 4)) == Signal(Matrix::Zero(2, 2)));
  EXPECT_TRUE(Signal(Matrix::Ones(2, 2)) == Signal(Matrix::Ones(2, 2)));
}

TEST(NumericalRank, ThresholdScalesWithShapeAndNorm) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-9;
  a(2, 2) = 1e-11;
  EXPECT_EQ(numerical_rank(a), 2);
  EXPECT_EQ(numerical_rank(1e8 * a), 2);
  EXPECT_EQ(numerical_rank(Matrix::Zero(2, 5)), 0);
  EXPECT_EQ(numerical_rank(Matrix(0, 3)), 0);
}

TEST(PsdDominates, Cases) {
  const Matrix I = Matrix::Identity(3, 3);
  PsdComparison c = psd_dominates(2 * I, I);
  EXPECT_TRUE(c.dominates);
  EXPECT_NEAR(c.margin, 1.0, 1e-14);
  c = psd_dominates(I, 2 * I);
  EXPECT_FALSE(c.dominates);
  EXPECT_NEAR(c.margin, -1.0, 1e-14);
}

TEST(PsdDominates, SmallGapAgainstEigensolver) {
  const Signal u = random_signal(2, 40, 3);
  const Matrix G = pe_gram(u, 3);
  const PsdComparison c = psd_dominates(G, G - 1e-3 * Matrix::Identity(6, 6));
  EXPECT_TRUE(c.dominates);
  EXPECT_NEAR(c.margin, 1e-3, 1e-9);
}

TEST(Kron, Shape) {
  const Matrix a = random_matrix(2, 3, 1);
  const Matrix k = kron(a, Matrix::Identity(2, 2));
  ASSERT_EQ(k.rows(), 4);
  ASSERT_EQ(k.cols(), 6);
  EXPECT_EQ(k(3, 5), a(1, 2));
  EXPECT_EQ(k(2, 5), 0.0);
}

TEST(InverseSqrt, Spd) {
  const Matrix r = random_matrix(4, 4, 9);
  const Matrix G = r * r.transpose() + Matrix::Identity(4, 4);
  const Matrix W = inverse_sqrt_spd(G);
  EXPECT_LE((W * G * W - Matrix::Identity(4, 4)).norm(), 1e-10);
}

TEST(Hankel, SmallScalar) {
  const HankelMatrix h = hankel(scalar({1, 2, 3}), 2);
  EXPECT_EQ(h.data, (Matrix(2, 2) << 1, 2, 2, 3).finished());
  EXPECT_EQ(h.source_length, 3);
}

TEST(Hankel, Impulse) {
  const HankelMatrix h = hankel(scalar({1, 0, 0, 0, 0}), 2);
  Matrix expected = Matrix::Zero(2, 4);
  expected(0, 0) = 1.0;
  EXPECT_EQ(h.data, expected);
  EXPECT_EQ(numerical_rank(h.data), 1);
}

TEST(Hankel, ColumnsAreWindows) {
  const Signal u = random_signal(3, 12, 2);
  const HankelMatrix h = hankel(u, 4);
  ASSERT_EQ(h.data.rows(), 12);
  ASSERT_EQ(h.data.cols(), 9);
  for (Eigen::Index j = 0; j < 9; ++j) EXPECT_EQ(Vector(h.data.col(j)), u.window(j, j + 3));
}

TEST(Hankel, RejectsBadDepth) {
  EXPECT_THROW(hankel(scalar({1, 2}), 3), InputError);
  EXPECT_THROW(hankel(scalar({1, 2}), 0), InputError);
}

TEST(PeOrder, Cases) {
  const Signal ones(Matrix::Ones(1, 10));
  EXPECT_TRUE(pe_order_check(ones, 1));
  EXPECT_FALSE(pe_order_check(ones, 2));
  EXPECT_FALSE(pe_order_check(scalar({1, 0, 0, 0, 0}), 2));
}

TEST(PeOrder, RandomSignalAgainstSvdRank) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix u(1, 30);
  for (Eigen::Index k = 0; k < 30; ++k) u(0, k) = dist(rng);
  const Signal s(u);
  const Matrix H = hankel(s, 5).data;
  Eigen::JacobiSVD<Matrix> svd(H);
  EXPECT_GT(svd.singularValues()(4), 1e-6);
  EXPECT_TRUE(pe_order_check(s, 5));
}

TEST(Gram, Forms) {
  EXPECT_EQ(pe_gram(scalar({1, 2, 3}), 2), (Matrix(2, 2) << 5, 8, 8, 13).finished());
  EXPECT_TRUE(pe_gram(Signal::Zero(2, 6), 2).isZero(0.0));
  const Signal u = random_signal(2, 50, 4);
  EXPECT_LE((pe_gram(u, 4) - pe_gram_summation(u, 4)).norm(), 1e-12 * pe_gram(u, 4).norm());
}

TEST(Kpe, ConstantSignal) {
  const Signal ones(Matrix::Ones(1, 7));
  PeCertificate c = kpe_check(ones, 1, Matrix::Constant(1, 1, 7.0));
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.margin, 0.0);
  c = kpe_check(ones, 1, Matrix::Constant(1, 1, 8.0));
  EXPECT_FALSE(c.holds);
}

TEST(Kpe, ZeroBoundAlwaysHolds) {
  EXPECT_TRUE(kpe_check(Signal::Zero(1, 5), 2, Matrix::Zero(2, 2)).holds);
  EXPECT_TRUE(kpe_check(random_signal(2, 9, 1), 3, Matrix::Zero(6, 6)).holds);
}

TEST(Kpe, HalfMinimumEigenvalue) {
  const Signal u = random_signal(2, 40, 21);
  const Matrix G = pe_gram(u, 3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const double lmin = es.eigenvalues()(0);
  const PeCertificate c = kpe_check(u, 3, 0.5 * lmin * Matrix::Identity(6, 6));
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.margin, 0.5 * lmin, 1e-9);
  EXPECT_LT(c.gram_consistency, 1e-12);
}

TEST(Kpe, RejectsMalformedBound) {
  const Signal u = random_signal(1, 10, 1);
  EXPECT_THROW(kpe_check(u, 2, Matrix::Identity(3, 3)), InputError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_THROW(kpe_check(u, 2, asym), InputError);
}

TEST(Certificate, Unbounded) {
  EXPECT_TRUE(pe_certificate(random_signal(2, 30, 5), 3).holds);
  EXPECT_FALSE(pe_certificate(Signal(Matrix::Ones(1, 10)), 2).holds);
}

}  // namespace
}  // namespace wfl
