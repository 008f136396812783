#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "caselasso/error.hpp"

namespace caselasso {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Subset;
class Dataset;
Subset make_subset(const Dataset& parent, const std::vector<Index>& rows);

/// Centered design matrix plus response. Immutable once built; every
/// downstream routine reads it through const references, so one instance can
/// be shared across worker threads.
///
/// Columns of `x()` have mean zero. `column_means()` and `column_scales()`
/// record the transform from the raw columns: centered = (raw - mean) / scale.
class Dataset {
 public:
  Dataset() = default;

  const Matrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }
  double y_mean() const noexcept { return y_mean_; }
  bool standardized() const noexcept { return standardized_; }
  const Vector& column_means() const noexcept { return means_; }
  const Vector& column_scales() const noexcept { return scales_; }
  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const std::string& response_name() const noexcept { return response_name_; }

  /// Squared column norms, cached at construction.
  const Vector& column_sq_norms() const noexcept { return sq_norms_; }

  auto row(Index i) const { return x_.row(i); }

  /// Maps a raw predictor row into this dataset's centered coordinates.
  Vector transform_row(const Eigen::Ref<const Vector>& raw) const {
    return ((raw - means_).array() / scales_.array()).matrix();
  }

  /// Checks the Dataset invariants; throws InputError on failure.
  void validate(double tol = 1e-12) const {
    if (n() < 2) throw InputError("dataset needs at least 2 cases");
    if (y_.size() != n()) throw InputError("response length does not match design rows");
    if (!x_.allFinite() || !y_.allFinite()) throw InputError("dataset contains non-finite entries");
    for (Index j = 0; j < p(); ++j) {
      const double mean = x_.col(j).mean();
      const double scale = std::max(1.0, x_.col(j).cwiseAbs().maxCoeff());
      if (std::abs(mean) > tol * scale)
        throw InputError("column " + std::to_string(j) + " is not centered");
    }
  }

 private:
  friend Dataset center_dataset(const Matrix&, const Vector&, bool, std::vector<std::string>,
                                std::string);
  friend struct Subset;
  friend Subset make_subset(const Dataset&, const std::vector<Index>&);

  void finish() {
    y_mean_ = y_.size() > 0 ? y_.mean() : 0.0;
    sq_norms_ = x_.colwise().squaredNorm().transpose();
  }

  Matrix x_;
  Vector y_;
  Vector means_;
  Vector scales_;
  Vector sq_norms_;
  double y_mean_ = 0.0;
  bool standardized_ = false;
  std::vector<std::string> names_;
  std::string response_name_ = "y";
};

/// Centers every column of `raw_x` to mean zero. With `standardize`, columns
/// are additionally scaled to unit squared norm (variance 1/n). The response
/// is left untouched; the unpenalized intercept absorbs its mean.
inline Dataset center_dataset(const Matrix& raw_x, const Vector& y, bool standardize = false,
                              std::vector<std::string> column_names = {},
                              std::string response_name = "y") {
  const Index n = raw_x.rows();
  const Index p = raw_x.cols();
  if (n < 2) throw InputError("dataset needs at least 2 cases, got " + std::to_string(n));
  if (y.size() != n)
    throw InputError("response has " + std::to_string(y.size()) + " entries but design has " +
                     std::to_string(n) + " rows");
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i)
      if (!std::isfinite(raw_x(i, j)))
        throw InputError("non-finite value in column " + std::to_string(j) + " (row " +
                         std::to_string(i) + ")");
  for (Index i = 0; i < n; ++i)
    if (!std::isfinite(y(i)))
      throw InputError("non-finite response value in row " + std::to_string(i));
  if (!column_names.empty() && static_cast<Index>(column_names.size()) != p)
    throw InputError("column name count does not match predictor count");

  Dataset d;
  d.means_ = raw_x.colwise().mean().transpose();
  d.x_ = raw_x.rowwise() - d.means_.transpose();
  // Second pass removes the residual mean left by roundoff in the first.
  const Vector drift = d.x_.colwise().mean().transpose();
  d.x_.rowwise() -= drift.transpose();
  d.means_ += drift;
  d.scales_ = Vector::Ones(p);
  if (standardize) {
    for (Index j = 0; j < p; ++j) {
      const double norm = d.x_.col(j).norm();
      if (!(norm > 0.0))
        throw InputError("column " + std::to_string(j) + " is constant and cannot be standardized");
      d.x_.col(j) /= norm;
      d.scales_(j) = norm;
    }
  }
  d.y_ = y;
  d.standardized_ = standardize;
  if (column_names.empty()) {
    column_names.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) column_names.push_back("x" + std::to_string(j + 1));
  }
  d.names_ = std::move(column_names);
  d.response_name_ = std::move(response_name);
  d.finish();
  return d;
}

/// A row subset of a dataset, re-centered. `shift` maps rows of the parent into
/// the subset's coordinates: x_sub = x_parent - shift.
struct Subset {
  Dataset data;
  Vector shift;
  std::vector<Index> rows;

  /// Parent row `i` expressed in subset coordinates.
  Vector local_row(const Dataset& parent, Index i) const {
    return parent.row(i).transpose() - shift;
  }
};

inline Subset make_subset(const Dataset& parent, const std::vector<Index>& rows) {
  if (rows.size() < 2) throw InputError("subset needs at least 2 rows");
  Subset s;
  s.rows = rows;
  const Index m = static_cast<Index>(rows.size());
  Matrix xs(m, parent.p());
  Vector ys(m);
  for (Index r = 0; r < m; ++r) {
    const Index i = rows[static_cast<std::size_t>(r)];
    if (i < 0 || i >= parent.n()) throw InputError("subset row out of range");
    xs.row(r) = parent.x().row(i);
    ys(r) = parent.y()(i);
  }
  s.shift = xs.colwise().mean().transpose();
  xs.rowwise() -= s.shift.transpose();
  const Vector drift = xs.colwise().mean().transpose();
  xs.rowwise() -= drift.transpose();
  s.shift += drift;

  Dataset& d = s.data;
  d.x_ = std::move(xs);
  d.y_ = std::move(ys);
  d.means_ = parent.means_ + (s.shift.array() * parent.scales_.array()).matrix();
  d.scales_ = parent.scales_;
  d.standardized_ = parent.standardized_;
  d.names_ = parent.names_;
  d.response_name_ = parent.response_name_;
  d.finish();
  return s;
}

/// All rows except `k`.
inline Subset drop_row(const Dataset& parent, Index k) {
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(parent.n() - 1));
  for (Index i = 0; i < parent.n(); ++i)
    if (i != k) rows.push_back(i);
  return make_subset(parent, rows);
}

}  // namespace caselasso
