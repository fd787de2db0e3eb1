#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "circrel/cli/commands.hpp"
#include "circrel/cli/reports.hpp"
#include "circrel/cli/scenario_io.hpp"
#include "circrel/error.hpp"
#include "test_support.hpp"

namespace circrel::cli {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("circrel_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

constexpr const char* kTurnaround = R"({
  "label": "turnaround", "time_unit": "min", "intervals": [140, 140],
  "legs": [
    {"delay": {"exponential": {"rate": 0.05}, "sample_size": 20},
     "service": {"exponential": {"rate": 0.02}, "sample_size": 20}},
    {"delay": {"exponential": {"rate": 0.05}, "sample_size": 20},
     "service": {"exponential": {"rate": 0.02}, "sample_size": 20}}
  ]
})";

constexpr const char* kSampleOnly = R"({
  "intervals": [4, 6],
  "legs": [ {"delay": {}, "service": {}}, {"delay": {}, "service": {}} ]
})";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::UnknownKind;
}

TEST(ScenarioJson, Parses) {
  const Scenario s = parse_scenario_json(kTurnaround);
  EXPECT_EQ(s.label, "turnaround");
  EXPECT_EQ(s.time_unit, "min");
  ASSERT_EQ(s.k(), 2u);
  EXPECT_EQ(*s.legs[1].service.rate, 0.02);
  EXPECT_EQ(*s.legs[0].delay.sample_size, 20u);
}

TEST(ScenarioJson, Errors) {
  EXPECT_EQ(kind_of([] { parse_scenario_json("{"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_scenario_json(R"({"intervals": [1], "legs": [{"delay": {"gamma": 1}, "service": {}}]})"); }),
            ErrorKind::UnknownKind);
  EXPECT_EQ(kind_of([] { parse_scenario_json(R"({"legs": []})"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_scenario_json(R"({"intervals": ["a"], "legs": []})"); }), ErrorKind::ParseError);
}

TEST_F(TempDir, CsvMergesSamples) {
  const auto json = write("s.json", kSampleOnly);
  const auto csv = write("s.csv", "leg,kind,value\n1,delay,1\n1,delay,3\n1,service,2\n2,delay,0.5\n2,service,4\n");
  const Scenario s = load_scenario(json, csv);
  EXPECT_EQ(s.legs[0].delay.samples, (std::vector<double>{1, 3}));
  EXPECT_EQ(s.legs[1].service.samples, (std::vector<double>{4}));
}

TEST_F(TempDir, CsvErrors) {
  const auto json = write("s.json", kSampleOnly);
  auto load = [&](const std::string& body) {
    return kind_of([&] { load_scenario(json, write("bad.csv", "leg,kind,value\n" + body)); });
  };
  try {
    load_scenario(json, write("neg.csv", "leg,kind,value\n1,delay,1\n2,service,-1\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidSample);
    EXPECT_EQ(e.leg(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_EQ(load("9,delay,1\n"), ErrorKind::IndexOutOfRange);
  EXPECT_EQ(load("1,arrival,1\n"), ErrorKind::UnknownKind);
  EXPECT_EQ(load("1,delay\n"), ErrorKind::ParseError);
  EXPECT_EQ(load("x,delay,1\n"), ErrorKind::ParseError);
  EXPECT_EQ(load("1,delay,abc\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([&] { load_scenario(json, write("h.csv", "a,b,c\n")); }), ErrorKind::ParseError);
  // service side of leg 2 never gets data
  EXPECT_EQ(load("1,delay,1\n1,service,1\n2,delay,1\n"), ErrorKind::EmptySample);
}

TEST(Reports, EstimateRoundTrip) {
  const EstimateReport r{0.62, 50, 12345678901234ull, 31};
  EXPECT_EQ(parse_estimate_json(estimate_json(r)), r);
  EXPECT_EQ(estimate_csv(r), "theta_star,resamples,seed,success_count\n0.62,50,12345678901234,31\n");
}

TEST(Reports, VarianceRoundTrip) {
  const Scenario s = testing::exponential_scenario(3, 0.05, 0.02, 20, 140);
  const VarianceReport v = variance_pipeline(s, 50, KernelMode::closed_form);
  const VarianceReport back = parse_variance_json(variance_json(v, s.plan.intervals));
  EXPECT_EQ(back.theta, v.theta);
  EXPECT_EQ(back.mu11(), v.mu11());
  EXPECT_EQ(back.variance, v.variance);
  EXPECT_EQ(back.resamples, 50u);
  EXPECT_EQ(back.kernel_mode, KernelMode::closed_form);
  EXPECT_EQ(back.method, Mu11Method::factorized);
  ASSERT_EQ(back.per_leg.size(), 3u);
  EXPECT_EQ(back.per_leg[2].out_in, v.per_leg[2].out_in);
}

TEST(Reports, SweepRoundTrip) {
  const std::vector<SweepRow> rows{{20, 0.1, 0.01, 1e-7}, {140, 0.5880592807374714, 0.35, 0.0124}};
  std::istringstream in(sweep_csv(rows));
  const auto back = parse_sweep_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].theta, rows[1].theta);
  EXPECT_EQ(back[0].variance, 1e-7);
}

TEST(Reports, NumberFormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 6.90165e-7, 0.0, 1e300}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(TimeGridParsing, Points) {
  EXPECT_EQ(parse_time_grid("20:300:40").points(), (std::vector<double>{20, 60, 100, 140, 180, 220, 260, 300}));
  EXPECT_EQ(parse_time_grid("5:5:1").points(), (std::vector<double>{5}));
  EXPECT_EQ(parse_time_grid("0:1:0.25").points().size(), 5u);
  for (const char* bad : {"1:2", "a:b:c", "5:1:1", "0:10:0", "0:10:-1", "-1:3:1"}) {
    EXPECT_EQ(kind_of([&] { parse_time_grid(bad); }), ErrorKind::InvalidArgument) << bad;
  }
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(Error(ErrorKind::NegativeSlack, "x")), kExitInput);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::ParseError, "x")), kExitInput);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::MissingSamples, "x")), kExitMissingData);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::MissingModel, "x")), kExitMissingData);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::QuadratureNonConvergence, "x")), kExitNumeric);
  EXPECT_EQ(exit_code_for(Error(ErrorKind::EnumerationTooLarge, "x")), kExitNumeric);
}

TEST_F(TempDir, CommandsProduceDeterministicOutput) {
  EstimateOptions e;
  e.input.scenario = write("s.json", kSampleOnly);
  e.input.samples = write("s.csv", "leg,kind,value\n1,delay,1\n1,delay,3\n1,service,2\n2,delay,0.5\n2,service,4\n2,service,7\n");
  e.resamples = 500;
  e.seed = 3;
  std::ostringstream o1, o2, o3, err;
  EXPECT_EQ(cmd_estimate(e, o1, err), kExitOk);
  EXPECT_EQ(cmd_estimate(e, o2, err), kExitOk);
  e.threads = 4;
  EXPECT_EQ(cmd_estimate(e, o3, err), kExitOk);
  EXPECT_EQ(o1.str(), o2.str());
  EXPECT_EQ(o1.str(), o3.str());
}

TEST_F(TempDir, SweepSinglePointMatchesVariance) {
  const auto json = write("t.json", kTurnaround);
  VarianceOptions v;
  v.input.scenario = json;
  v.resamples = 50;
  std::ostringstream vout, sout, err;
  ASSERT_EQ(cmd_variance(v, vout, err), kExitOk);
  SweepOptions s;
  s.input.scenario = json;
  s.grid = "140:140:1";
  s.resamples = 50;
  ASSERT_EQ(cmd_sweep(s, sout, err), kExitOk);
  const VarianceReport report = parse_variance_json(vout.str());
  std::istringstream in(sout.str());
  const auto rows = parse_sweep_csv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].variance, report.variance);
  EXPECT_EQ(rows[0].theta, report.theta);
}

TEST_F(TempDir, SweepIsThreadIndependent) {
  const auto json = write("t.json", kTurnaround);
  SweepOptions s;
  s.input.scenario = json;
  s.grid = "20:300:40";
  s.resamples = 50;
  std::ostringstream a, b, err;
  ASSERT_EQ(cmd_sweep(s, a, err), kExitOk);
  s.threads = 3;
  ASSERT_EQ(cmd_sweep(s, b, err), kExitOk);
  EXPECT_EQ(a.str(), b.str());
}

TEST_F(TempDir, CommandExitCodes) {
  std::ostringstream out, err;
  EstimateOptions e;
  e.input.scenario = write("bad.json", R"({"intervals": [-1], "legs": [{"delay": {"samples": [1]}, "service": {"samples": [1]}}]})");
  EXPECT_EQ(cmd_estimate(e, out, err), kExitInput);
  EXPECT_NE(err.str().find("NegativeSlack"), std::string::npos);

  e.input.scenario = write("t.json", kTurnaround);
  EXPECT_EQ(cmd_estimate(e, out, err), kExitMissingData);

  VarianceOptions v;
  v.input.scenario = write("nosize.json", R"({"intervals": [10], "legs": [{"delay": {"exponential": {"rate": 0.1}}, "service": {"exponential": {"rate": 0.2}}}]})");
  v.resamples = 5;
  EXPECT_EQ(cmd_variance(v, out, err), kExitMissingData);
  v.input.sample_size = 10;
  EXPECT_EQ(cmd_variance(v, out, err), kExitOk);
}

TEST(DefaultSeed, EnvironmentOverride) {
  ::unsetenv("CIRCREL_SEED");
  EXPECT_EQ(default_seed(), kDefaultSeed);
  ::setenv("CIRCREL_SEED", "1234", 1);
  EXPECT_EQ(default_seed(), 1234u);
  ::unsetenv("CIRCREL_SEED");
}

}  // namespace
}  // namespace circrel::cli
