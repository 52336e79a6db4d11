#include "wfl/generate.hpp"

#include <cmath>
#include <random>
#include <string>

#include "wfl/linalg.hpp"

namespace wfl {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  }
  return out;
}

double spectral_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Prepends `delays` unit input delays: z1+ = u, z2+ = z1, ..., x+ = A x + B z_last.
LtiSystem with_input_delays(const LtiSystem& base, Eigen::Index delays) {
  if (delays == 0) return base;
  const Eigen::Index n = base.n();
  const Eigen::Index m = base.m();
  const Eigen::Index size = n + m * delays;
  Matrix A = Matrix::Zero(size, size);
  Matrix B = Matrix::Zero(size, m);
  Matrix C = Matrix::Zero(base.p(), size);
  A.topLeftCorner(n, n) = base.A();
  A.block(0, size - m, n, m) = base.B();
  // Delay line occupies states n .. size-1; the first delay stage is fed by u.
  B.block(n, 0, m, m).setIdentity();
  for (Eigen::Index s = 1; s < delays; ++s) {
    A.block(n + m * s, n + m * (s - 1), m, m).setIdentity();
  }
  C.leftCols(n) = base.C();
  return LtiSystem(A, B, C, base.D());
}

void validate(const RandomModelSpec& spec) {
  if (spec.n < 0 || spec.m < 1 || spec.p < 1) {
    throw InputError("random model needs n >= 0, m >= 1, p >= 1");
  }
  if (!(spec.spectral_radius_cap > 0.0)) throw InputError("spectral radius cap must be positive");
  if (std::isnan(spec.controllability_floor) || spec.controllability_floor < 0.0) {
    throw InputError("controllability floor must be non-negative");
  }
  if (spec.relative_degree < 0) throw InputError("relative degree must be non-negative");
  if (spec.relative_degree > 0 && spec.n == 0) {
    throw InputError("a positive relative degree needs n >= 1");
  }
  if (spec.max_attempts < 1) throw InputError("max_attempts must be positive");
}

}  // namespace

LtiSystem generate_system(const RandomModelSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Matrix A = gaussian(spec.n, spec.n, rng);
    const double rho = spectral_radius(A);
    if (rho > spec.spectral_radius_cap) A *= spec.spectral_radius_cap / rho;
    Matrix B = gaussian(spec.n, spec.m, rng);
    Matrix C = gaussian(spec.p, spec.n, rng);
    Matrix D = gaussian(spec.p, spec.m, rng);
    if (spec.relative_degree > 0) D.setZero();

    const LtiSystem sys =
        with_input_delays(LtiSystem(A, B, C, D), std::max<Eigen::Index>(0, spec.relative_degree - 1));
    if (sys.n() > 0) {
      const Vector s = singular_values(controllability_matrix(sys));
      if (!(s(sys.n() - 1) >= spec.controllability_floor)) continue;
    }
    if (spec.require_output_reachable) {
      const Vector s = singular_values(markov_parameters(sys).stacked());
      if (s.size() < sys.p() || !(s(sys.p() - 1) >= spec.controllability_floor)) continue;
    }
    if (spec.relative_degree > 0 && relative_degree(sys) != spec.relative_degree) continue;
    return sys;
  }
  throw GenerationError("no system satisfying the random model spec after " +
                        std::to_string(spec.max_attempts) + " attempts (n=" +
                        std::to_string(spec.n) + ", m=" + std::to_string(spec.m) +
                        ", p=" + std::to_string(spec.p) + ")");
}

Vector gaussian_vector(Eigen::Index size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gaussian(size, 1, rng);
}

PeInput generate_pe_input(Eigen::Index m, Eigen::Index length, Eigen::Index order,
                          const Matrix& K_floor, std::uint64_t seed) {
  if (m < 1 || order < 1) throw InputError("generate_pe_input: m and order must be positive");
  if (length < (m + 1) * order - 1) {
    throw InputError("generate_pe_input: length " + std::to_string(length) +
                     " is too short for order " + std::to_string(order) + " with m = " +
                     std::to_string(m) + " (need " + std::to_string((m + 1) * order - 1) + ")");
  }
  const Eigen::Index size = m * order;
  if (K_floor.rows() != size || K_floor.cols() != size) {
    throw InputError("generate_pe_input: K_floor must be " + std::to_string(size) + "x" +
                     std::to_string(size));
  }
  std::mt19937_64 rng(seed);
  Signal u(gaussian(m, length, rng));

  double scale = 1.0;
  if (!K_floor.isZero(0.0)) {
    const Matrix G = pe_gram(u, order);
    const Matrix W = inverse_sqrt_spd(G);
    const double needed = lambda_max_sym(W * symmetrize(K_floor) * W);
    // Nudge past the boundary so the certificate margin is not rounding-negative.
    if (needed > 1.0) scale = std::sqrt(needed) * (1.0 + 1e-9);
  }
  PeInput out{scale == 1.0 ? u : Signal(scale * u.samples()), {}, scale};
  out.certificate = kpe_check(out.u, order, symmetrize(K_floor));
  return out;
}

}  // namespace wfl
