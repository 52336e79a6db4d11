#pragma once

#include <random>

#include <gtest/gtest.h>

#include "wfl/generate.hpp"
#include "wfl/lti.hpp"

namespace wfl::test {

// The system used throughout the necessity counterexample: a two-state
// shift register read out in full.
inline LtiSystem shift_register() {
  Matrix A(2, 2), B(2, 1);
  A << 0, 0, 1, 0;
  B << 1, 0;
  return LtiSystem(A, B, Matrix::Identity(2, 2), Matrix::Zero(2, 1));
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = dist(rng);
  return out;
}

inline Signal random_signal(Eigen::Index dim, Eigen::Index length, std::uint64_t seed) {
  return Signal(random_matrix(dim, length, seed));
}

inline LtiSystem random_system(Eigen::Index n, Eigen::Index m, Eigen::Index p, std::uint64_t seed,
                               bool output_reachable = false) {
  RandomModelSpec spec;
  spec.n = n;
  spec.m = m;
  spec.p = p;
  spec.require_output_reachable = output_reachable;
  return generate_system(spec, seed);
}

inline double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace wfl::test
