#pragma once

#include <cstdint>

#include "wfl/lti.hpp"
#include "wfl/pe.hpp"

namespace wfl {

struct RandomModelSpec {
  Eigen::Index n = 2;
  Eigen::Index m = 1;
  Eigen::Index p = 1;
  double spectral_radius_cap = 0.95;
  /// Lower bound on sigma_min of [B AB ... A^{n-1}B].
  double controllability_floor = 1e-3;
  /// Also require sigma_p(Gamma) >= controllability_floor.
  bool require_output_reachable = false;
  /// 0: dense random D. r >= 1: D = 0 and r - 1 unit input delays are
  /// prepended, which adds m(r - 1) states (n counts the base system).
  Eigen::Index relative_degree = 0;
  int max_attempts = 100;
};

/// Deterministic in `seed`; throws GenerationError after max_attempts
/// rejected draws and InputError for malformed specs.
LtiSystem generate_system(const RandomModelSpec& spec, std::uint64_t seed);

struct PeInput {
  Signal u;
  PeCertificate certificate;
  double scale = 1.0;
};

/// i.i.d. standard Gaussian samples scaled up by the smallest factor s >= 1
/// for which the order-`order` Gram dominates K_floor.
/// Throws InputError when N < (m + 1) order - 1.
PeInput generate_pe_input(Eigen::Index m, Eigen::Index length, Eigen::Index order,
                          const Matrix& K_floor, std::uint64_t seed);

/// Standard Gaussian vector / matrix draws shared by tests and the sweep.
Vector gaussian_vector(Eigen::Index size, std::uint64_t seed);

/// SplitMix64 step; derives independent per-trial seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace wfl
