#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"

namespace caselasso {

/// Columns of `x` listed in `cols`, in that order.
inline Matrix gather_columns(const Matrix& x, const std::vector<Index>& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = x.col(cols[c]);
  return out;
}

inline Vector gather(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out(static_cast<Index>(c)) = v(idx[c]);
  return out;
}

/// Inverse of X_A' X_A for a centered design, kept current under single
/// column additions and removals by block (rank-one) updates. Because columns
/// are centered, the intercept decouples: the hat matrix of (1, X_A) is
/// 1/n + X_A (X_A' X_A)^{-1} X_A'.
///
/// Worker-local scratch; not meant to be shared between threads.
class GramState {
 public:
  static constexpr int kRefactorInterval = 50;

  GramState() = default;

  /// Builds the inverse column by column, so a dependent column is reported
  /// by index.
  static GramState build(const Dataset& data, const std::vector<Index>& active) {
    GramState g;
    g.inverse_.resize(0, 0);
    for (Index j : active) g.add(data, j);
    g.updates_since_refactor_ = 0;
    return g;
  }

  const std::vector<Index>& active() const noexcept { return active_; }
  const Matrix& inverse() const noexcept { return inverse_; }
  Index size() const noexcept { return static_cast<Index>(active_.size()); }
  int updates_since_refactor() const noexcept { return updates_since_refactor_; }

  /// Position of column j in the active ordering, or -1.
  Index position(Index j) const {
    auto it = std::find(active_.begin(), active_.end(), j);
    return it == active_.end() ? -1 : static_cast<Index>(it - active_.begin());
  }

  /// Appends column j. Throws SingularUpdateError when the new column is
  /// (numerically) in the span of the current ones.
  void add(const Dataset& data, Index j) {
    if (position(j) >= 0) throw InputError("column " + std::to_string(j) + " already active");
    const auto z = data.x().col(j);
    const double zz = z.squaredNorm();
    const Index m = size();
    if (m == 0) {
      if (!(zz > 0.0))
        throw SingularUpdateError("column " + std::to_string(j) + " is zero after centering", j);
      inverse_.resize(1, 1);
      inverse_(0, 0) = 1.0 / zz;
      active_.push_back(j);
      bump(data);
      return;
    }
    const Matrix xa = gather_columns(data.x(), active_);
    const Vector b = xa.transpose() * z;
    const Vector u = inverse_ * b;
    const double schur = zz - b.dot(u);
    if (!(schur > 1e-12 * zz))
      throw SingularUpdateError("column " + std::to_string(j) +
                                    " is linearly dependent on the active columns",
                                j);
    Matrix next(m + 1, m + 1);
    next.topLeftCorner(m, m) = inverse_ + u * u.transpose() / schur;
    next.topRightCorner(m, 1) = -u / schur;
    next.bottomLeftCorner(1, m) = -u.transpose() / schur;
    next(m, m) = 1.0 / schur;
    inverse_ = std::move(next);
    active_.push_back(j);
    bump(data);
  }

  /// Removes column j.
  void drop(Index j, const Dataset& data) {
    const Index q = position(j);
    if (q < 0) throw InputError("column " + std::to_string(j) + " is not active");
    const Index m = size();
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(m - 1));
    for (Index r = 0; r < m; ++r)
      if (r != q) keep.push_back(r);
    Matrix f(m - 1, m - 1);
    Vector e(m - 1);
    for (Index a = 0; a < m - 1; ++a) {
      e(a) = inverse_(keep[a], q);
      for (Index b = 0; b < m - 1; ++b) f(a, b) = inverse_(keep[a], keep[b]);
    }
    const double d = inverse_(q, q);
    inverse_ = f - e * e.transpose() / d;
    active_.erase(active_.begin() + q);
    bump(data);
  }

  /// Recomputes the inverse from scratch for the current ordering.
  void refactor(const Dataset& data) {
    updates_since_refactor_ = 0;
    if (active_.empty()) {
      inverse_.resize(0, 0);
      return;
    }
    const Matrix xa = gather_columns(data.x(), active_);
    const Matrix gram = xa.transpose() * xa;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError("Gram matrix factorization failed");
    inverse_ = ldlt.solve(Matrix::Identity(size(), size()));
  }

  /// (X_A' X_A)^{-1} x_{kA}.
  Vector solve_row(const Dataset& data, Index k) const {
    if (active_.empty()) return Vector();
    return inverse_ * gather(data.x().row(k).transpose(), active_);
  }

  /// h_kk = 1/n + x_kA' (X_A'X_A)^{-1} x_kA.
  double leverage(const Dataset& data, Index k) const {
    const double base = 1.0 / static_cast<double>(data.n());
    if (active_.empty()) return base;
    const Vector xk = gather(data.x().row(k).transpose(), active_);
    return base + xk.dot(inverse_ * xk);
  }

  /// k-th column of the hat matrix of (1, X_A).
  Vector hat_column(const Dataset& data, Index k) const {
    const double base = 1.0 / static_cast<double>(data.n());
    Vector h = Vector::Constant(data.n(), base);
    if (active_.empty()) return h;
    const Matrix xa = gather_columns(data.x(), active_);
    h.noalias() += xa * solve_row(data, k);
    return h;
  }

  /// Diagonal of the hat matrix of (1, X_A).
  Vector hat_diagonal(const Dataset& data) const {
    const double base = 1.0 / static_cast<double>(data.n());
    Vector h = Vector::Constant(data.n(), base);
    if (active_.empty()) return h;
    const Matrix xa = gather_columns(data.x(), active_);
    const Matrix t = xa * inverse_;
    h += (t.array() * xa.array()).rowwise().sum().matrix();
    return h;
  }

  /// max |G^{-1} G - I|, for verification.
  double inverse_residual(const Dataset& data) const {
    if (active_.empty()) return 0.0;
    const Matrix xa = gather_columns(data.x(), active_);
    const Matrix prod = inverse_ * (xa.transpose() * xa);
    return (prod - Matrix::Identity(size(), size())).cwiseAbs().maxCoeff();
  }

 private:
  void bump(const Dataset& data) {
    if (++updates_since_refactor_ >= kRefactorInterval) refactor(data);
  }

  std::vector<Index> active_;
  Matrix inverse_;
  int updates_since_refactor_ = 0;
};

struct HatQuantities {
  double h_kk = 0.0;
  Vector h_col;
  GramState gram;
};

/// Leverage and hat column of case k for the model (1, X_A).
inline HatQuantities hat_quantities(const Dataset& data, const std::vector<Index>& active, Index k) {
  if (k < 0 || k >= data.n()) throw InputError("case index out of range");
  HatQuantities q;
  q.gram = GramState::build(data, active);
  q.h_kk = q.gram.leverage(data, k);
  q.h_col = q.gram.hat_column(data, k);
  return q;
}

enum class GramEventKind { kAdd, kDrop };

struct GramEvent {
  GramEventKind kind;
  Index column;
};

/// Applies one add or drop to a copy of `gram`.
inline GramState gram_update(GramState gram, GramEvent event, const Dataset& data) {
  if (event.kind == GramEventKind::kAdd)
    gram.add(data, event.column);
  else
    gram.drop(event.column, data);
  return gram;
}

}  // namespace caselasso
