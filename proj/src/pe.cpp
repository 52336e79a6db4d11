#include "wfl/pe.hpp"

#include <string>

#include "wfl/linalg.hpp"

namespace wfl {

namespace {

void require_depth(const Signal& u, Eigen::Index depth) {
  if (depth < 1) throw InputError("Hankel depth must be positive");
  if (u.length() < depth) {
    throw InputError("Hankel depth " + std::to_string(depth) + " exceeds signal length " +
                     std::to_string(u.length()));
  }
}

}  // namespace

HankelMatrix hankel(const Signal& u, Eigen::Index depth) {
  require_depth(u, depth);
  const Eigen::Index q = u.dim();
  const Eigen::Index cols = u.length() - depth + 1;
  HankelMatrix h;
  h.depth = depth;
  h.sample_dim = q;
  h.source_length = u.length();
  h.data.resize(q * depth, cols);
  for (Eigen::Index i = 0; i < depth; ++i) {
    h.data.middleRows(q * i, q) = u.samples().middleCols(i, cols);
  }
  return h;
}

bool pe_order_check(const Signal& u, Eigen::Index depth, double rank_rtol) {
  const HankelMatrix h = hankel(u, depth);
  return numerical_rank(h.data, rank_rtol) == h.data.rows();
}

Matrix pe_gram(const Signal& u, Eigen::Index depth) {
  const HankelMatrix h = hankel(u, depth);
  Matrix g = h.data * h.data.transpose();
  return symmetrize(g);
}

Matrix pe_gram_summation(const Signal& u, Eigen::Index depth) {
  require_depth(u, depth);
  const Eigen::Index size = u.dim() * depth;
  Matrix g = Matrix::Zero(size, size);
  for (Eigen::Index k = 0; k + depth <= u.length(); ++k) {
    const Vector w = u.window(k, k + depth - 1);
    g.noalias() += w * w.transpose();
  }
  return g;
}

PeCertificate kpe_check(const Signal& u, Eigen::Index depth, const Matrix& bound,
                        double psd_tol) {
  const Eigen::Index size = u.dim() * depth;
  if (bound.rows() != size || bound.cols() != size) {
    throw InputError("kpe_check: bound must be " + std::to_string(size) + "x" +
                     std::to_string(size));
  }
  if (!is_symmetric(bound)) throw InputError("kpe_check: bound is not symmetric");

  PeCertificate cert;
  cert.order = depth;
  cert.gram = pe_gram(u, depth);
  const Matrix summed = pe_gram_summation(u, depth);
  cert.gram_consistency =
      (cert.gram - summed).norm() / std::max(1.0, cert.gram.norm());
  cert.bound = bound;
  const PsdComparison cmp = psd_dominates(cert.gram, bound, psd_tol);
  cert.margin = cmp.margin;
  cert.threshold = cmp.threshold;
  cert.holds = cmp.dominates;
  return cert;
}

PeCertificate pe_certificate(const Signal& u, Eigen::Index depth, const Tolerances& tol) {
  PeCertificate cert;
  cert.order = depth;
  cert.gram = pe_gram(u, depth);
  cert.gram_consistency =
      (cert.gram - pe_gram_summation(u, depth)).norm() / std::max(1.0, cert.gram.norm());
  cert.margin = lambda_min_sym(cert.gram);
  cert.holds = pe_order_check(u, depth, tol.rank_rtol);
  return cert;
}

}  // namespace wfl
