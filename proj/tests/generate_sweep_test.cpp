#include <limits>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wfl/generate.hpp"
#include "wfl/io.hpp"
#include "wfl/linalg.hpp"
#include "wfl/sweep.hpp"

namespace wfl {
namespace {

double spectral_radius(const Matrix& A) {
  return A.size() ? Eigen::EigenSolver<Matrix>(A, false).eigenvalues().cwiseAbs().maxCoeff() : 0.0;
}

TEST(MixSeed, DistinctStreams) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST(GenerateSystem, Deterministic) {
  RandomModelSpec spec;
  spec.n = 2;
  spec.m = 1;
  const LtiSystem a = generate_system(spec, 42);
  const LtiSystem b = generate_system(spec, 42);
  EXPECT_EQ(a.A(), b.A());
  EXPECT_EQ(a.B(), b.B());
  EXPECT_EQ(a.C(), b.C());
  EXPECT_EQ(a.D(), b.D());
  EXPECT_NE(generate_system(spec, 43).A(), a.A());
}

TEST(GenerateSystem, InfeasibleFloor) {
  RandomModelSpec spec;
  spec.controllability_floor = std::numeric_limits<double>::infinity();
  EXPECT_THROW(generate_system(spec, 1), GenerationError);
  spec.controllability_floor = -1.0;
  EXPECT_THROW(generate_system(spec, 1), InputError);
}

TEST(GenerateSystem, ThousandSeedsSatisfyPredicates) {
  RandomModelSpec spec;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    spec.n = 1 + seed % 5;
    spec.m = 1 + seed % 3;
    spec.p = 1 + (seed / 5) % 3;
    const LtiSystem s = generate_system(spec, seed);
    ASSERT_TRUE(is_controllable(s)) << "seed " << seed;
    ASSERT_GE(sigma_min(controllability_matrix(s)), spec.controllability_floor * (1 - 1e-12));
    ASSERT_LE(spectral_radius(s.A()), spec.spectral_radius_cap * (1 + 1e-9));
  }
}

TEST(GenerateSystem, RelativeDegree) {
  for (Eigen::Index r = 1; r <= 3; ++r) {
    RandomModelSpec spec;
    spec.n = 2;
    spec.m = 2;
    spec.p = 1;
    spec.relative_degree = r;
    const LtiSystem s = generate_system(spec, 5);
    EXPECT_EQ(s.n(), 2 + 2 * (r - 1));
    EXPECT_EQ(relative_degree(s), r);
    EXPECT_TRUE(s.D().isZero(0.0));
  }
}

TEST(GeneratePeInput, IdentityFloor) {
  const PeInput in = generate_pe_input(1, 30, 5, Matrix::Identity(5, 5), 3);
  EXPECT_TRUE(in.certificate.holds);
  EXPECT_GE(in.certificate.margin, 0.0);
  EXPECT_GE(in.scale, 1.0);
}

TEST(GeneratePeInput, ScalesToLargeFloor) {
  const PeInput in = generate_pe_input(2, 40, 3, 1e4 * Matrix::Identity(6, 6), 8);
  EXPECT_GT(in.scale, 1.0);
  EXPECT_TRUE(in.certificate.holds);
  EXPECT_GE(in.certificate.margin, 0.0);
}

TEST(GeneratePeInput, ZeroFloorIsRawGaussian) {
  const PeInput in = generate_pe_input(2, 20, 3, Matrix::Zero(6, 6), 11);
  EXPECT_EQ(in.scale, 1.0);
  EXPECT_EQ(in.u, generate_pe_input(2, 20, 3, Matrix::Zero(6, 6), 11).u);
  EXPECT_NE(in.u, generate_pe_input(2, 20, 3, Matrix::Zero(6, 6), 12).u);
}

TEST(GeneratePeInput, TooShort) {
  EXPECT_THROW(generate_pe_input(2, 10, 5, Matrix::Zero(10, 10), 1), InputError);
  EXPECT_THROW(generate_pe_input(1, 30, 5, Matrix::Zero(4, 4), 1), InputError);
}

TEST(SweepConfig, Validation) {
  SweepConfig c;
  c.which = {Check::kOutputExcitation};
  EXPECT_NO_THROW(validate(c));
  c.trials = 0;
  EXPECT_THROW(validate(c), InputError);
  c.trials = 1;
  c.n = {3, 2};
  EXPECT_THROW(validate(c), InputError);
  c.n = {1, 5};
  c.length = 4;
  EXPECT_THROW(validate(c), InputError);
  c.length = 0;
  c.which.clear();
  EXPECT_THROW(validate(c), InputError);
}

TEST(SweepConfig, CheckNamesAndAliases) {
  EXPECT_EQ(parse_check("thm1"), Check::kFilteredInputExcitation);
  EXPECT_EQ(parse_check("filtered-input-excitation"), Check::kFilteredInputExcitation);
  EXPECT_EQ(parse_check("eq14"), Check::kInputDirectional);
  EXPECT_EQ(parse_check("prop1"), Check::kRankImpliesImage);
  EXPECT_THROW(parse_check("thm9"), InputError);
}

SweepConfig small_config() {
  SweepConfig c;
  c.seed = 99;
  c.trials = 12;
  c.depth = 2;
  for (const char* name : {"lemma1", "eq7", "thm1", "cor1", "eq13", "eq14", "cor2", "thm3",
                           "prop1", "robust"}) {
    c.which.push_back(parse_check(name));
  }
  return c;
}

TEST(Sweep, NoFailures) {
  const SweepResult r = run_sweep(small_config());
  EXPECT_EQ(r.total.fails, 0);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.trials.size(), 12u);
  EXPECT_GT(r.total.holds, 0);
}

TEST(Sweep, SummaryIndependentOfWorkers) {
  SweepConfig c = small_config();
  c.workers = 1;
  const std::string one = io::summary_to_json(c, run_sweep(c)).dump();
  c.workers = 4;
  const SweepResult r4 = run_sweep(c);
  c.workers = 1;  // the summary echoes the config; compare like with like
  EXPECT_EQ(io::summary_to_json(c, r4).dump(), one);
  EXPECT_EQ(io::summary_to_json(c, run_sweep(c)).dump(), one);
}

TEST(Sweep, TrialsAreOrderedAndSeeded) {
  SweepConfig c = small_config();
  c.workers = 3;
  const SweepResult r = run_sweep(c);
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    EXPECT_EQ(r.trials[i].index, static_cast<Eigen::Index>(i));
    for (const auto& rep : r.trials[i].reports) {
      ASSERT_TRUE(rep.context.seed.has_value());
      EXPECT_EQ(*rep.context.seed, r.trials[i].seed);
    }
  }
}

TEST(Sweep, Counterexample) {
  SweepConfig c;
  c.trials = 1;
  c.which = {Check::kCounterexample};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.trials.size(), 1u);
  ASSERT_EQ(r.trials[0].reports.size(), 1u);
  EXPECT_EQ(r.trials[0].reports[0].verdict, Verdict::kHolds);
  EXPECT_NE(r.trials[0].reports[0].note.find("Claim 1 falsified"), std::string::npos);
}

}  // namespace
}  // namespace wfl
