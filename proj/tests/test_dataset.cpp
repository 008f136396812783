#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <caselasso/dataset.hpp>
#include <caselasso/error.hpp>

using namespace caselasso;

namespace {

Matrix random_matrix(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(3.0, 2.0);
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = z(rng);
  return m;
}

}  // namespace

TEST(CenterDataset, SubtractsColumnMean) {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const Dataset d = center_dataset(x, Vector::Zero(3));
  EXPECT_DOUBLE_EQ(d.x()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(d.x()(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.x()(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.column_means()(0), 2.0);
}

TEST(CenterDataset, ConstantColumnCentersToZero) {
  const Matrix x = Matrix::Ones(3, 1);
  const Dataset d = center_dataset(x, Vector::Ones(3));
  EXPECT_EQ(d.x().col(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(d.column_sq_norms()(0), 0.0);
}

TEST(CenterDataset, ConstantColumnRejectedWhenStandardizing) {
  Matrix x = random_matrix(4, 2, 1);
  x.col(1).setConstant(5.0);
  EXPECT_THROW(center_dataset(x, Vector::Zero(4), true), InputError);
}

TEST(CenterDataset, RandomColumnsCenteredAndScaled) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = random_matrix(5, 3, seed);
    const Dataset plain = center_dataset(x, Vector::Zero(5));
    const Dataset scaled = center_dataset(x, Vector::Zero(5), true);
    for (Index j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(plain.x().col(j).mean()), 1e-12);
      EXPECT_LT(std::abs(scaled.x().col(j).mean()), 1e-12);
      EXPECT_NEAR(scaled.x().col(j).squaredNorm(), 1.0, 1e-12);
    }
    EXPECT_NO_THROW(scaled.validate());
  }
}

TEST(CenterDataset, NonFiniteInputNamesColumn) {
  Matrix x = random_matrix(4, 3, 2);
  x(2, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    center_dataset(x, Vector::Zero(4));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }
  Vector y = Vector::Zero(4);
  y(0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(center_dataset(random_matrix(4, 3, 2), y), InputError);
}

TEST(CenterDataset, ShapeMismatchRejected) {
  EXPECT_THROW(center_dataset(random_matrix(4, 2, 3), Vector::Zero(3)), InputError);
  EXPECT_THROW(center_dataset(random_matrix(1, 2, 3), Vector::Zero(1)), InputError);
}

TEST(CenterDataset, TransformRowMatchesStoredRows) {
  const Matrix x = random_matrix(6, 3, 4);
  const Dataset d = center_dataset(x, Vector::Zero(6), true);
  for (Index i = 0; i < 6; ++i)
    EXPECT_LT((d.transform_row(x.row(i).transpose()) - d.x().row(i).transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Subset, DropRowRecentersAndTracksShift) {
  const Matrix x = random_matrix(7, 3, 5);
  const Dataset d = center_dataset(x, Vector::LinSpaced(7, 0.0, 6.0));
  const Subset s = drop_row(d, 2);
  EXPECT_EQ(s.data.n(), 6);
  EXPECT_LT(s.data.x().colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_DOUBLE_EQ(s.data.y_mean(), (21.0 - 2.0) / 6.0);
  for (std::size_t r = 0; r < s.rows.size(); ++r)
    EXPECT_LT((s.local_row(d, s.rows[r]) - s.data.x().row(static_cast<Index>(r)).transpose()).cwiseAbs().maxCoeff(),
              1e-12);
  EXPECT_THROW(make_subset(d, {0}), InputError);
  EXPECT_THROW(make_subset(d, {0, 9}), InputError);
}
