// Exercises the shared library through its C header only.
#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "wfl/wfl.h"

namespace {

using Json = nlohmann::json;

std::string take(char* s) {
  std::string out = s ? s : "";
  wfl_string_free(s);
  return out;
}

wfl_system* shift_register() {
  const double A[] = {0, 0, 1, 0};
  const double B[] = {1, 0};
  const double C[] = {1, 0, 0, 1};
  const double D[] = {0, 0};
  wfl_system* sys = nullptr;
  EXPECT_EQ(wfl_system_create(2, 1, 2, A, B, C, D, &sys), WFL_OK);
  return sys;
}

TEST(CApi, SimulateRowMajor) {
  wfl_system* sys = shift_register();
  const double u[] = {1, 0, 0, 0};
  wfl_signal* in = nullptr;
  ASSERT_EQ(wfl_signal_create(1, 4, u, &in), WFL_OK);
  const double x0[] = {3, 4};
  wfl_signal* y = nullptr;
  ASSERT_EQ(wfl_simulate(sys, x0, in, nullptr, &y), WFL_OK);
  int64_t dim = 0, len = 0;
  ASSERT_EQ(wfl_signal_dims(y, &dim, &len), WFL_OK);
  ASSERT_EQ(dim, 2);
  ASSERT_EQ(len, 4);
  std::vector<double> data(8);
  ASSERT_EQ(wfl_signal_copy_data(y, data.data()), WFL_OK);
  EXPECT_EQ(data, (std::vector<double>{3, 1, 0, 0, 4, 3, 1, 0}));
  wfl_signal_free(y);
  wfl_signal_free(in);
  wfl_system_free(sys);
}

TEST(CApi, ErrorsCarryMessages) {
  const double one[] = {1};
  wfl_system* sys = nullptr;
  EXPECT_EQ(wfl_system_create(-1, 1, 1, one, one, one, one, &sys), WFL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(wfl_system_create(1, 1, 1, one, nullptr, one, one, &sys), WFL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(wfl_system_from_json("{\"n\": 1}", &sys), WFL_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::strlen(wfl_last_error()), 0u);
  EXPECT_EQ(wfl_system_from_json("not json", &sys), WFL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(wfl_generate_system(2, 1, 1, 0.95, 1e300, 0, 0, 1, &sys), WFL_ERR_GENERATION);
  EXPECT_EQ(wfl_system_dims(nullptr, nullptr, nullptr, nullptr), WFL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, JsonAndCsvRoundTrip) {
  wfl_system* sys = nullptr;
  ASSERT_EQ(wfl_generate_system(3, 2, 2, 0.95, 1e-3, 1, 0, 5, &sys), WFL_OK);
  char* json = nullptr;
  ASSERT_EQ(wfl_system_to_json(sys, &json), WFL_OK);
  wfl_system* back = nullptr;
  ASSERT_EQ(wfl_system_from_json(json, &back), WFL_OK);
  wfl_string_free(json);
  int64_t n = 0, m = 0, p = 0;
  ASSERT_EQ(wfl_system_dims(back, &n, &m, &p), WFL_OK);
  EXPECT_EQ(n, 3);
  EXPECT_EQ(m, 2);
  EXPECT_EQ(p, 2);

  wfl_signal* u = nullptr;
  ASSERT_EQ(wfl_generate_pe_input(2, 80, 4, nullptr, 3, &u, nullptr), WFL_OK);
  char* csv = nullptr;
  ASSERT_EQ(wfl_signal_to_csv(u, &csv), WFL_OK);
  wfl_signal* u2 = nullptr;
  ASSERT_EQ(wfl_signal_from_csv(csv, &u2), WFL_OK);
  wfl_string_free(csv);
  std::vector<double> a(160), b(160);
  wfl_signal_copy_data(u, a.data());
  wfl_signal_copy_data(u2, b.data());
  EXPECT_EQ(a, b);
  wfl_signal_free(u2);
  wfl_signal_free(u);
  wfl_system_free(back);
  wfl_system_free(sys);
}

TEST(CApi, BoundsReports) {
  wfl_system* sys = nullptr;
  ASSERT_EQ(wfl_generate_system(2, 1, 1, 0.95, 1e-3, 1, 0, 9, &sys), WFL_OK);
  wfl_signal* u = nullptr;
  ASSERT_EQ(wfl_generate_pe_input(1, 80, 1, nullptr, 4, &u, nullptr), WFL_OK);
  wfl_bound_options opts;
  wfl_bound_options_default(&opts);
  opts.depth = 2;
  char* json = nullptr;
  ASSERT_EQ(wfl_bound_report(sys, nullptr, u, "all", &opts, 0, &json), WFL_OK) << wfl_last_error();
  const Json all = Json::parse(take(json));
  ASSERT_TRUE(all.is_array());
  for (const auto& r : all) EXPECT_NE(r["verdict"], "fails") << r.dump();

  ASSERT_EQ(wfl_bound_report(sys, nullptr, u, "thm3", &opts, 1, &json), WFL_OK);
  const Json one = Json::parse(take(json));
  EXPECT_EQ(one["name"], "state-input-excitation");
  EXPECT_TRUE(one.contains("lhs"));

  opts.eps = 0.01;
  ASSERT_EQ(wfl_bound_report(sys, nullptr, u, "robust", &opts, 0, &json), WFL_OK);
  EXPECT_EQ(Json::parse(take(json))["verdict"], "holds");

  EXPECT_EQ(wfl_bound_report(sys, nullptr, u, "bogus", &opts, 0, &json),
            WFL_ERR_INVALID_ARGUMENT);
  wfl_signal_free(u);
  wfl_system_free(sys);
}

TEST(CApi, DesignInputGain) {
  wfl_system* sys = shift_register();
  const double Ky[] = {2, 0, 0, 2};
  double k = 0.0;
  ASSERT_EQ(wfl_design_input_gain(sys, Ky, 1e-10, &k), WFL_OK);
  EXPECT_DOUBLE_EQ(k, 6.0);
  wfl_system_free(sys);
}

TEST(CApi, Counterexample) {
  char* json = nullptr;
  char* summary = nullptr;
  ASSERT_EQ(wfl_counterexample(6, nullptr, 0, &json, &summary), WFL_OK);
  const Json j = Json::parse(take(json));
  EXPECT_EQ(j["verdict"], "Claim 1 falsified");
  EXPECT_EQ(j["M_u_0_2"], Json::array({0.0, 1.0}));
  EXPECT_NE(take(summary).find("Claim 1 falsified"), std::string::npos);
}

TEST(CApi, Sweep) {
  char* out = nullptr;
  int code = -1;
  ASSERT_EQ(wfl_sweep(R"({"seed": 1, "trials": 3, "which": ["cor1", "prop1"]})", "json", &out,
                      &code),
            WFL_OK)
      << wfl_last_error();
  const Json j = Json::parse(take(out));
  EXPECT_EQ(code, 0);
  EXPECT_EQ(j["trials"].size(), 3u);
  EXPECT_EQ(j["summary"]["total"]["fails"], 0);
  EXPECT_EQ(wfl_sweep(R"({"trials": 0, "which": ["cor1"]})", "json", &out, &code),
            WFL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(wfl_sweep("{", "json", &out, &code), WFL_ERR_INVALID_ARGUMENT);
}

TEST(CApi, StructuredExportAndHankel) {
  wfl_system* sys = shift_register();
  char* json = nullptr;
  ASSERT_EQ(wfl_structured_export(sys, 2, -1, &json), WFL_OK);
  const Json j = Json::parse(take(json));
  EXPECT_EQ(j["csv"]["M"], "0,1,0\n1,0,0\n");
  wfl_system_free(sys);

  const double u[] = {1, 2, 3};
  wfl_signal* s = nullptr;
  ASSERT_EQ(wfl_signal_create(1, 3, u, &s), WFL_OK);
  char* csv = nullptr;
  ASSERT_EQ(wfl_hankel_csv(s, 2, 1, &csv), WFL_OK);
  EXPECT_EQ(take(csv), "5,8\n8,13\n");
  ASSERT_EQ(wfl_pe_check(s, 2, 1e-10, 1e-9, &json), WFL_OK);
  EXPECT_EQ(Json::parse(take(json))["pe"], true);
  wfl_signal_free(s);
}

}  // namespace
