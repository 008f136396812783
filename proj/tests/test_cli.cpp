#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace caselasso;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(std::move(args), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string diabetes() { return std::string(CASELASSO_DATA_DIR) + "/diabetes.csv"; }

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("caselasso_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_F(CliFiles, FitHugeLambdaGivesInterceptOnly) {
  const std::string csv = write("toy.csv", "x1,x2,y\n1,0,2\n2,1,3\n3,5,7\n");
  for (const auto& pen : std::vector<std::vector<std::string>>{{"--lambda", "1e9"}, {"--fraction", "0"}}) {
    std::vector<std::string> args{"fit", csv};
    args.insert(args.end(), pen.begin(), pen.end());
    const Result r = invoke(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::Json::parse(r.out);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["active_set"].size(), 0u);
    for (const auto& b : j["beta"]) EXPECT_EQ(b.get<double>(), 0.0);
    EXPECT_DOUBLE_EQ(j["beta0"].get<double>(), 4.0);
  }
}

TEST(Cli, FitMatchesLibraryOnDiabetes) {
  const Result r = invoke({"fit", diabetes(), "--lambda", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  const Dataset data = io::to_dataset(io::read_csv_file(diabetes()));
  const LassoSolution lib = fit_lasso(data, 3.0);
  const LassoSolution cli = io::solution_from_json(j);
  EXPECT_EQ(cli.active_set, lib.active_set);
  EXPECT_LE((cli.beta - lib.beta).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(cli.kkt_violation, 1e-8);
}

TEST_F(CliFiles, ParseErrorsExitTwoWithLocation) {
  const std::string csv = write("bad.csv", "a,y\n1,2\n3,oops\n");
  const Result r = invoke({"fit", csv, "--lambda", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3, column 2"), std::string::npos);
  EXPECT_EQ(invoke({"fit", path("missing.csv"), "--lambda", "1"}).code, 2);
  EXPECT_EQ(invoke({"fit", csv}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"--format", "xml", "fit", csv, "--lambda", "1"}).code, 2);
}

TEST_F(CliFiles, PathCaseOutOfRangeExitsTwo) {
  const Result r = invoke({"path", diabetes(), "--lambda", "3", "--case", "443"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(invoke({"path", diabetes(), "--lambda", "3", "--case", "0"}).code, 2);
}

TEST_F(CliFiles, PathAtOriginCaseHasOneSegment) {
  // x_3 equals the column means, so it sits at the origin after centering.
  const std::string csv = write("origin.csv", "a,b,y\n1,4,1\n3,0,5\n2,2,2.5\n0,1,0.5\n4,3,6\n");
  const std::string svg = path("coef.svg");
  const Result r = invoke({"path", csv, "--lambda", "0.5", "--case", "3", "--svg", svg});
  ASSERT_EQ(r.code, 0) << r.err;
  const WeightPath p = io::path_from_json(io::Json::parse(r.out));
  EXPECT_EQ(p.segments.size(), 1u);
  EXPECT_EQ(p.case_index, 2);
  const std::string text = slurp(svg);
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(text, "<polyline"), 2u);
}

TEST(Cli, PathJsonRoundTripMatchesInterpolation) {
  const Result r = invoke({"path", diabetes(), "--fraction", "0.6", "--case", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const WeightPath back = io::path_from_json(io::Json::parse(r.out));
  const Dataset data = io::to_dataset(io::read_csv_file(diabetes()));
  const WeightPath lib = compute_path(data, back.lambda, 29, fit_lasso(data, back.lambda));
  ASSERT_EQ(back.segments.size(), lib.segments.size());
  for (double w : {1.0, 0.7, 0.4, 0.1, 0.0}) {
    const auto a = interpolate(lib, w);
    const auto b = interpolate(back, w);
    EXPECT_LE((a.beta - b.beta).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.beta0, b.beta0, 1e-12);
  }
}

TEST_F(CliFiles, GraphCsvSchemaAndEndpoints) {
  const std::string svg = path("graph.svg");
  const Result r = invoke({"graph", diabetes(), "--grid", "6", "--svg", svg});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].rfind("fraction,lambda,threshold,d_bar,case1,", 0), 0u);
  EXPECT_EQ(count(rows[0], ",") + 1, 442u + 4u);
  EXPECT_EQ(rows[1].rfind("0,", 0), 0u);
  EXPECT_EQ(rows[6].rfind("1,", 0), 0u);
  const std::string text = slurp(svg);
  EXPECT_EQ(count(text, "<polyline"), 443u);
  EXPECT_NE(text.find("data-label=\"threshold\""), std::string::npos);
}

TEST(Cli, ScenarioOneGraphRowIsConstant) {
  const sim::RawData raw = sim::scenario_data(sim::Scenario::kI, 11);
  const fs::path csv = fs::temp_directory_path() / "caselasso_scenario1.csv";
  {
    std::ofstream out(csv);
    out << "x1,x2,y\n";
    for (Index i = 0; i < raw.x.rows(); ++i)
      out << io::number(raw.x(i, 0)) << ',' << io::number(raw.x(i, 1)) << ',' << io::number(raw.y(i)) << '\n';
  }
  const Result r = invoke({"graph", csv.string(), "--grid", "11", "--format", "json"});
  fs::remove(csv);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  double lo = 1e300, hi = -1e300;
  for (const auto& row : j["rows"]) {
    const double d = row["distances"][9].get<double>();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  EXPECT_LE(hi - lo, 1e-9 * std::max(1.0, hi));
}

TEST_F(CliFiles, LooCurveMatchesLibrary) {
  std::ostringstream body;
  body << "a,b,c,y\n";
  const Matrix x = sim::gen_design(12, 3, 0.3, std::uint64_t{5});
  for (Index i = 0; i < 12; ++i)
    body << io::number(x(i, 0)) << ',' << io::number(x(i, 1)) << ',' << io::number(x(i, 2)) << ','
         << io::number(2.0 * x(i, 0) - x(i, 2) + 0.3 * std::sin(1.0 + i)) << '\n';
  const std::string csv = write("tiny.csv", body.str());
  const Result r = invoke({"cv", csv, "--loo", "--grid", "9", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::Json::parse(r.out);
  const CvCurve lib = loo_cv(io::to_dataset(io::read_csv_file(csv)), fraction_grid(9));
  ASSERT_EQ(j["mse"].size(), lib.mse.size());
  for (std::size_t i = 0; i < lib.mse.size(); ++i) EXPECT_EQ(j["mse"][i].get<double>(), lib.mse[i]);
  EXPECT_EQ(j["lambda_hat"].get<double>(), lib.lambda_hat);
}

TEST_F(CliFiles, DetectIsByteReproducibleAndVerifies) {
  std::ostringstream body;
  body << "x1,x2,x3,x4,y\n";
  const Matrix x = sim::gen_design(40, 4, 0.2, std::uint64_t{17});
  for (Index i = 0; i < 40; ++i) {
    for (Index j = 0; j < 4; ++j) body << io::number(x(i, j)) << ',';
    body << io::number(x(i, 0) - 0.5 * x(i, 1) + std::cos(3.0 * i) + (i == 0 ? 8.0 : 0.0)) << '\n';
  }
  const std::string csv = write("detect.csv", body.str());
  const Result a = invoke({"detect", csv, "--seed", "5", "--folds", "5"});
  const Result b = invoke({"--threads", "1", "detect", csv, "--folds", "5", "--seed", "5"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Result v = invoke({"detect", csv, "--seed", "5", "--folds", "5", "--verify"});
  ASSERT_EQ(v.code, 0) << v.err;
  const auto j = io::Json::parse(v.out);
  EXPECT_EQ(j["kind"], "detection_report");
  ASSERT_TRUE(j.contains("verification"));
  for (const auto& [key, delta] : j["verification"].items()) EXPECT_LE(delta.get<double>(), 1e-6) << key;
  EXPECT_EQ(j["flagged"][0], 1);
}

TEST_F(CliFiles, SimulateEchoesConfigAndRejectsUnknownKey) {
  const std::string cfg = write("run.cfg", "# small\nn = 25\np = 4\nq = 2\nb = 6\nv = 1 -1\nreplicates = 3\nfolds = 5\nseed = 4\n");
  const Result r = invoke({"simulate", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header.rfind("n,p,a,b,q,v,replicates,seed,", 0), 0u);
  EXPECT_EQ(row.rfind("25,4,0,6,2,1 -1,3,4,", 0), 0u);
  EXPECT_EQ(r.out, invoke({"simulate", cfg}).out);

  const std::string bad = write("bad.cfg", "n = 25\nwarp_factor = 9\n");
  const Result e = invoke({"simulate", bad});
  EXPECT_EQ(e.code, 2);
  EXPECT_NE(e.err.find("warp_factor"), std::string::npos);
}

TEST_F(CliFiles, OutputFlagWritesFile) {
  const std::string csv = write("toy.csv", "x1,y\n1,2\n2,3\n3,7\n");
  const std::string out = path("fit.json");
  const Result r = invoke({"fit", csv, "--lambda", "0.1", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(io::Json::parse(slurp(out))["kind"], "lasso_solution");
}
