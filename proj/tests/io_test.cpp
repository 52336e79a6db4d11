#include <gtest/gtest.h>

#include "support.hpp"
#include "wfl/io.hpp"

namespace wfl {
namespace {

using test::random_signal;
using test::random_system;

TEST(SystemJson, RoundTrip) {
  const LtiSystem s = random_system(3, 2, 2, 4);
  const LtiSystem back = io::system_from_json(io::Json::parse(io::system_to_json(s).dump()));
  EXPECT_EQ(back.A(), s.A());
  EXPECT_EQ(back.B(), s.B());
  EXPECT_EQ(back.C(), s.C());
  EXPECT_EQ(back.D(), s.D());
}

TEST(SystemJson, StaticSystem) {
  const auto j = io::Json::parse(R"({"n":0,"m":1,"p":1,"A":[],"B":[],"C":[[]],"D":[[2]]})");
  const LtiSystem s = io::system_from_json(j);
  EXPECT_EQ(s.n(), 0);
  EXPECT_EQ(s.D()(0, 0), 2.0);
}

TEST(SystemJson, Malformed) {
  EXPECT_THROW(io::system_from_json(io::Json::parse(R"({"n":1,"m":1,"p":1})")), InputError);
  EXPECT_THROW(io::system_from_json(io::Json::parse(
                   R"({"n":1,"m":1,"p":1,"A":[[1,2]],"B":[[1]],"C":[[1]],"D":[[0]]})")),
               InputError);
  EXPECT_THROW(io::system_from_json(io::Json::parse(
                   R"({"n":1,"m":1,"p":1,"A":[["x"]],"B":[[1]],"C":[[1]],"D":[[0]]})")),
               InputError);
  EXPECT_THROW(io::system_from_json(io::Json::parse("[1]")), InputError);
}

TEST(SignalCsv, RoundTripIsExact) {
  const Signal u = random_signal(3, 17, 2);
  const std::string csv = io::signal_to_csv(u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,v0,v1,v2");
  EXPECT_EQ(io::signal_from_csv(csv), u);
}

TEST(SignalCsv, Malformed) {
  EXPECT_THROW(io::signal_from_csv(""), InputError);
  EXPECT_THROW(io::signal_from_csv("t,v0\n0,1\n"), InputError);
  EXPECT_THROW(io::signal_from_csv("k,v0\n0,1\n1,abc\n"), InputError);
  EXPECT_THROW(io::signal_from_csv("k,v0\n0,1,2\n"), InputError);
  EXPECT_THROW(io::signal_from_csv("k,v0\n1,1\n"), InputError);
  EXPECT_THROW(io::signal_from_csv("k,v0\n"), InputError);
}

TEST(MatrixCsv, RoundTrip) {
  const Matrix a = test::random_matrix(3, 4, 1);
  EXPECT_EQ(io::matrix_from_csv(io::matrix_to_csv(a)), a);
  EXPECT_THROW(io::matrix_from_csv("1,2\n3\n"), InputError);
}

TEST(SweepConfigJson, RoundTripAndErrors) {
  const auto j = io::Json::parse(
      R"({"seed": 5, "trials": 3, "n": [1, 2], "m": 1, "L": 2, "which": ["thm1", "cor1"],
          "tol": {"rank": 1e-11}})");
  const SweepConfig c = io::sweep_config_from_json(j);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.n.hi, 2);
  EXPECT_EQ(c.m.lo, 1);
  EXPECT_EQ(c.m.hi, 1);
  EXPECT_EQ(c.tol.rank_rtol, 1e-11);
  ASSERT_EQ(c.which.size(), 2u);
  EXPECT_EQ(c.which[1], Check::kOutputExcitation);
  const SweepConfig back = io::sweep_config_from_json(io::sweep_config_to_json(c));
  EXPECT_EQ(io::sweep_config_to_json(back).dump(), io::sweep_config_to_json(c).dump());

  EXPECT_THROW(io::sweep_config_from_json(io::Json::parse(R"({"trials": 0, "which": ["thm1"]})")),
               InputError);
  EXPECT_THROW(io::sweep_config_from_json(io::Json::parse(R"({"trails": 2, "which": ["thm1"]})")),
               InputError);
  EXPECT_THROW(io::sweep_config_from_json(io::Json::parse(R"({"which": ["nope"]})")), InputError);
  EXPECT_THROW(io::sweep_config_from_json(io::Json::parse(R"({"seed": "x", "which": ["thm1"]})")),
               InputError);
}

TEST(Reports, JsonAndCsvShape) {
  BoundReport r;
  r.name = "output-excitation";
  r.verdict = Verdict::kHolds;
  r.margin = 0.5;
  r.note = "a, b";
  r.context.seed = 7;
  r.chain.push_back({"step", 1.0, true});
  const io::Json j = io::report_to_json(r);
  EXPECT_EQ(j["verdict"], "holds");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["chain"][0]["step"], "step");
  const std::string csv = io::reports_to_csv({r}, "", "");
  EXPECT_NE(csv.find("output-excitation,dominance,holds,0.5"), std::string::npos);
  EXPECT_EQ(csv.find("a, b"), std::string::npos);
}

TEST(StructuredExport, Files) {
  const LtiSystem s = random_system(2, 1, 2, 3);
  const io::StructuredExport ex = io::export_structured(build_structured_set(s, 3, 1), s, 3);
  for (const char* name : {"d", "Gamma", "M", "Dbar", "Gammabar", "Z", "T", "M_ext", "Mbar_r"}) {
    EXPECT_EQ(ex.csv.count(name), 1u) << name;
  }
  EXPECT_EQ(ex.metadata["L"], 3);
  EXPECT_EQ(io::matrix_from_csv(ex.csv.at("M")), build_M(s));
}

}  // namespace
}  // namespace wfl
