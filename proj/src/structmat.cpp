#include "wfl/structmat.hpp"

#include <string>

#include "internal.hpp"
#include "wfl/linalg.hpp"

namespace wfl {

namespace {

void require_matching(const MarkovParameters& markov, const AnnihilatingPolynomial& d) {
  if (static_cast<Eigen::Index>(markov.blocks.size()) != d.degree() + 1) {
    throw InputError("Markov parameter count does not match polynomial degree");
  }
}

}  // namespace

Matrix build_M(const MarkovParameters& markov, const AnnihilatingPolynomial& d) {
  require_matching(markov, d);
  const Eigen::Index n = d.degree();
  const Eigen::Index p = markov.blocks.front().rows();
  const Eigen::Index m = markov.blocks.front().cols();
  Matrix M = Matrix::Zero(p, m * (n + 1));
  // Block column i holds M_{n-i}.
  for (Eigen::Index j = 0; j <= n; ++j) {
    auto block = M.middleCols(m * (n - j), m);
    for (Eigen::Index q = 0; q <= j; ++q) {
      block += d.d(j - q) * markov.blocks[static_cast<std::size_t>(q)];
    }
  }
  return M;
}

Matrix build_M(const LtiSystem& sys) {
  return build_M(markov_parameters(sys), annihilating_polynomial(sys));
}

Matrix build_Dbar(const AnnihilatingPolynomial& d) {
  const Eigen::Index size = d.degree() + 1;
  Matrix out = Matrix::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; i + j < size; ++j) {
      out(i, j) = d.coeffs(i + j);
    }
  }
  return out;
}

Matrix build_Gammabar_relaxed(const MarkovParameters& markov, Eigen::Index r) {
  const Eigen::Index n = markov.order();
  if (r < 0 || r > n) {
    throw InputError("relaxation index r = " + std::to_string(r) + " outside [0, " +
                     std::to_string(n) + "]");
  }
  const Eigen::Index p = markov.blocks.front().rows();
  const Eigen::Index m = markov.blocks.front().cols();
  const Eigen::Index size = n + 1 - r;
  Matrix out = Matrix::Zero(p * size, m * size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      out.block(p * i, m * j, p, m) = markov.blocks[static_cast<std::size_t>(r + i - j)];
    }
  }
  return out;
}

Matrix build_Gammabar(const MarkovParameters& markov) {
  return build_Gammabar_relaxed(markov, 0);
}

Matrix build_M_via_gammabar(const MarkovParameters& markov, const AnnihilatingPolynomial& d) {
  require_matching(markov, d);
  const Eigen::Index p = markov.blocks.front().rows();
  return kron(d.coeffs.transpose(), Matrix::Identity(p, p)) * build_Gammabar(markov);
}

Matrix build_M_via_dbar(const MarkovParameters& markov, const AnnihilatingPolynomial& d) {
  require_matching(markov, d);
  const Eigen::Index m = markov.blocks.front().cols();
  return markov.stacked() * kron(build_Dbar(d), Matrix::Identity(m, m));
}

Matrix build_T(const AnnihilatingPolynomial& d, Eigen::Index depth) {
  if (depth < 1) throw InputError("build_T: depth must be positive");
  const Eigen::Index n = d.degree();
  Matrix T = Matrix::Zero(depth - 1, depth + n - 1);
  for (Eigen::Index i = 0; i + 1 < depth; ++i) {
    T.block(i, i, 1, n + 1) = d.coeffs.transpose();
  }
  return T;
}

ZMatrix build_Z(const LtiSystem& sys, Eigen::Index depth, double rank_rtol) {
  if (depth < 1) throw InputError("build_Z: depth must be positive");
  const Eigen::Index n = sys.n();
  const Eigen::Index m = sys.m();
  const LtiSystem ext = detail::extend_unchecked(sys);
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);

  ZMatrix out;
  out.M_ext = build_M(markov_parameters(ext), d);
  out.T = build_T(d, depth);
  const Eigen::Index rows = (n + m) + m * (depth - 1);
  out.Z = Matrix::Zero(rows, m * (depth + n));
  out.Z.topLeftCorner(n + m, m * (n + 1)) = out.M_ext;
  if (depth > 1) {
    out.Z.bottomRightCorner(m * (depth - 1), m * (depth + n - 1)) =
        kron(out.T, Matrix::Identity(m, m));
  }
  const Eigen::Index rank = numerical_rank(out.Z, rank_rtol);
  if (rank < rows) {
    out.rank_warning = "Z has row rank " + std::to_string(rank) + " < " + std::to_string(rows) +
                       "; (A, B) is not controllable";
  }
  return out;
}

RelaxedM build_relaxed_M(const LtiSystem& sys, Eigen::Index r) {
  const MarkovParameters markov = markov_parameters(sys);
  const Matrix gammabar_r = build_Gammabar_relaxed(markov, r);
  const AnnihilatingPolynomial d = annihilating_polynomial(sys);
  const Eigen::Index n = sys.n();
  RelaxedM out;
  out.r = r;
  out.d = d.coeffs.tail(n + 1 - r);
  out.M = kron(out.d.transpose(), Matrix::Identity(sys.p(), sys.p())) * gammabar_r;
  return out;
}

StructuredSet build_structured_set(const LtiSystem& sys, std::optional<Eigen::Index> depth,
                                   std::optional<Eigen::Index> relaxation) {
  StructuredSet set{annihilating_polynomial(sys), markov_parameters(sys), {}, {}, {}, {}, {}};
  set.M = build_M(set.markov, set.d);
  set.Dbar = build_Dbar(set.d);
  set.Gammabar = build_Gammabar(set.markov);
  if (depth) set.z = build_Z(sys, *depth);
  if (relaxation) set.relaxed = build_relaxed_M(sys, *relaxation);
  return set;
}

}  // namespace wfl
