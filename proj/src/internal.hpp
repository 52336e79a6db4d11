#pragma once

#include <chrono>

#include "wfl/lti.hpp"

namespace wfl::detail {

LtiSystem extend_unchecked(const LtiSystem& sys);

/// Default quantitative bound: 0.9 x the achieved Gram.
inline constexpr double kDefaultBoundFraction = 0.9;

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace wfl::detail
