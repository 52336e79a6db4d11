#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wfl/bounds.hpp"

namespace wfl {

/// Checks the sweep knows how to run. Each has a descriptive name; the short
/// aliases thm1, cor1, eq13, eq14, cor2, thm3, prop1, lemma1, eq7, robust are
/// accepted on input as well.
enum class Check {
  kIoRepresentation,
  kMFactorizations,
  kFilteredInputExcitation,
  kOutputExcitation,
  kOutputDirectional,
  kInputDirectional,
  kRelaxedExcitation,
  kStateInputExcitation,
  kRankImpliesImage,
  kRobustExcitation,
  kCounterexample,
};

const char* check_name(Check c);
/// Throws InputError for unknown names.
Check parse_check(const std::string& name);

struct IndexRange {
  Eigen::Index lo = 1;
  Eigen::Index hi = 1;
};

struct SweepConfig {
  std::uint64_t seed = 0;
  Eigen::Index trials = 1;
  IndexRange n{1, 5};
  IndexRange m{1, 3};
  IndexRange p{1, 3};
  /// 0 selects 20 (L + n) per trial.
  Eigen::Index length = 0;
  Eigen::Index depth = 1;
  Tolerances tol;
  std::vector<Check> which;
  double spectral_radius_cap = 0.95;
  double controllability_floor = 1e-3;
  /// Model-error radius for the robust check.
  double eps = 1e-1;
  unsigned workers = 1;
};

/// Throws InputError when a range is empty, trials < 1, `which` is empty,
/// or an explicit length is shorter than L + n_max.
void validate(const SweepConfig& config);

struct TrialRecord {
  Eigen::Index index = 0;
  std::uint64_t seed = 0;
  ReportContext dims;
  std::vector<BoundReport> reports;
};

struct VerdictCounts {
  Eigen::Index holds = 0;
  Eigen::Index fails = 0;
  Eigen::Index inapplicable = 0;
};

struct SweepResult {
  std::vector<TrialRecord> trials;  // ordered by trial index
  VerdictCounts total;
  std::map<std::string, VerdictCounts> per_check;

  /// 0 when nothing failed, 1 otherwise.
  int exit_code() const { return total.fails == 0 ? 0 : 1; }
};

/// Runs every selected check on `trials` independently seeded instances,
/// using up to `workers` threads. Results do not depend on the worker count.
SweepResult run_sweep(const SweepConfig& config);

/// Runs the selected checks for a single trial index.
TrialRecord run_trial(const SweepConfig& config, Eigen::Index index);

}  // namespace wfl
