#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <caselasso/caselasso.hpp>
#include <caselasso/io/config.hpp>
#include <caselasso/io/csv.hpp>
#include <caselasso/io/serialize.hpp>
#include <caselasso/io/svg.hpp>

#include "support.hpp"

using namespace caselasso;
using testing_support::random_dataset;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Csv, ParsesHeaderAndScientificNotation) {
  std::istringstream in("a,b,y\n1,2e-1,3\n\n-4,+5,6.5E2\n");
  const io::Table t = io::read_csv(in);
  ASSERT_EQ(t.header.size(), 3u);
  EXPECT_EQ(t.values.rows(), 2);
  EXPECT_DOUBLE_EQ(t.values(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(t.values(1, 2), 650.0);
}

TEST(Csv, ErrorNamesLineAndColumn) {
  std::istringstream in("a,y\n1,2\n3,x\n");
  try {
    io::read_csv(in);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3, column 2"), std::string::npos);
  }
  std::istringstream ragged("a,y\n1,2,3\n");
  EXPECT_THROW(io::read_csv(ragged), InputError);
}

TEST(Csv, ResponseByNameOrLastColumn) {
  std::istringstream in("y,a,b\n1,2,3\n4,5,7\n6,1,1\n");
  const io::Table t = io::read_csv(in);
  const Dataset last = io::to_dataset(t);
  EXPECT_EQ(last.response_name(), "b");
  const Dataset named = io::to_dataset(t, "y");
  EXPECT_EQ(named.response_name(), "y");
  EXPECT_EQ(named.column_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(io::to_dataset(t, "nope"), InputError);
}

TEST(Json, PathRoundTripReproducesInterpolation) {
  const Dataset data = random_dataset(25, 6, 41);
  const double lambda = 0.3 * (data.x().transpose() * data.y()).cwiseAbs().maxCoeff();
  const LassoSolution full = fit_lasso(data, lambda);
  for (Index k : {0, 7, 19}) {
    const WeightPath path = compute_path(data, lambda, k, full);
    const std::string text = io::to_json(path).dump();
    const WeightPath back = io::path_from_json(io::Json::parse(text));
    ASSERT_EQ(back.segments.size(), path.segments.size());
    EXPECT_EQ(back.case_index, k);
    for (double w : {1.0, 0.9, 0.55, 0.31, 0.05, 0.0}) {
      const auto a = interpolate(path, w);
      const auto b = interpolate(back, w);
      EXPECT_EQ(a.beta0, b.beta0);
      EXPECT_EQ((a.beta - b.beta).cwiseAbs().maxCoeff(), 0.0);
    }
    EXPECT_EQ(back.loo_solution.active_set, path.loo_solution.active_set);
  }
}

TEST(Json, InfinityAndSchemaVersion) {
  const io::Json j = io::detail::number(kInf);
  EXPECT_EQ(j, "inf");
  EXPECT_TRUE(std::isinf(io::detail::read_number(j)));
  io::Json bad = io::to_json(LassoSolution{});
  bad["schema_version"] = 99;
  EXPECT_THROW(io::solution_from_json(bad), InputError);
}

TEST(Svg, OnePolylinePerCoefficient) {
  const Dataset data = random_dataset(20, 4, 8);
  const double lambda = 0.2 * (data.x().transpose() * data.y()).cwiseAbs().maxCoeff();
  const WeightPath path = compute_path(data, lambda, 3, fit_lasso(data, lambda));
  const std::string svg = io::coefficient_path_svg(path, data.column_names());
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_EQ(svg.find("<script"), std::string::npos);
}

TEST(Svg, GraphHasThresholdCurve) {
  InfluenceGraph g;
  g.fractions = {0.0, 0.5, 1.0};
  g.lambdas = {2.0, 1.0, 0.0};
  g.thresholds = {0.1, 0.2, 0.3};
  g.d_bar = {0.0, 0.1, 0.1};
  g.distances = Matrix::Constant(3, 5, 0.05);
  const std::string svg = io::influence_graph_svg(g);
  EXPECT_EQ(count(svg, "<polyline"), 6u);
  EXPECT_NE(svg.find("data-label=\"threshold\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
}

TEST(Config, ParsesRunsAndRejectsUnknownKeys) {
  std::istringstream in("# two runs\nn = 40\np = 6\nv = 1, -1 0.5\nq = 2\n[run]\nn = 30\np = 4\nq = 1\n");
  const auto runs = io::read_sim_configs(in);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].n, 40);
  EXPECT_EQ(runs[0].v, (std::vector<double>{1.0, -1.0, 0.5}));
  EXPECT_EQ(runs[1].p, 4);
  std::istringstream bad("n = 40\nmystery = 3\n");
  try {
    io::read_sim_configs(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("mystery"), std::string::npos);
  }
}
