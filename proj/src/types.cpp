#include "wfl/types.hpp"

#include <string>

namespace wfl {

Signal::Signal(Matrix samples) : samples_(std::move(samples)) {
  if (samples_.cols() < 1) {
    throw InputError("signal must contain at least one sample");
  }
  if (!samples_.allFinite()) {
    throw InputError("signal contains non-finite entries");
  }
}

Signal Signal::Zero(Eigen::Index dim, Eigen::Index length) {
  return Signal(Matrix::Zero(dim, length));
}

Vector Signal::window(Eigen::Index a, Eigen::Index b) const {
  if (a < 0 || b < a || b >= length()) {
    throw InputError("window [" + std::to_string(a) + ", " + std::to_string(b) +
                     "] outside signal of length " + std::to_string(length()));
  }
  const Eigen::Index q = dim();
  Vector w(q * (b - a + 1));
  for (Eigen::Index k = a; k <= b; ++k) {
    w.segment(q * (k - a), q) = samples_.col(k);
  }
  return w;
}

Signal Signal::slice(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 1 || first + count > length()) {
    throw InputError("slice outside signal");
  }
  return Signal(samples_.middleCols(first, count));
}

bool operator==(const Signal& a, const Signal& b) {
  return a.dim() == b.dim() && a.length() == b.length() && a.samples_ == b.samples_;
}

}  // namespace wfl
