#pragma once

// Brute-force reference solvers. Nothing here calls the path, Gram or
// fixed-lambda solver code; only Dataset and the shared result types are used.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/types.hpp"

namespace caselasso::oracle {

struct OracleOptions {
  double tol = 1e-10;
  long max_sweeps = 200000;
};

/// Lasso with per-row weights w and an explicit intercept, on an arbitrary
/// (not necessarily centered) design.
class WeightedProblem {
 public:
  WeightedProblem(Matrix x, Vector y, Vector w, double lambda)
      : x_(std::move(x)), y_(std::move(y)), w_(std::move(w)), lambda_(lambda) {
    if (x_.rows() != y_.size() || w_.size() != y_.size()) throw InputError("weighted problem: size mismatch");
    if ((w_.array() < 0.0).any()) throw InputError("weights must be nonnegative");
    if (!(w_.sum() > 0.0)) throw InputError("weights sum to zero");
  }

  /// max{ |sum w r|, |g_j + lambda sign b_j| (b_j != 0), (|g_j| - lambda)_+ (b_j = 0) }
  /// with g = -X' W r.
  double kkt(double b0, const Vector& b) const {
    Vector wr = w_.cwiseProduct(residual(b0, b));
    const Vector g = -(x_.transpose() * wr);
    double v = std::abs(wr.sum());
    for (Index j = 0; j < b.size(); ++j) {
      const double s = b(j) > 0 ? 1.0 : (b(j) < 0 ? -1.0 : 0.0);
      v = std::max(v, s != 0.0 ? std::abs(g(j) + lambda_ * s) : std::abs(g(j)) - lambda_);
    }
    return v;
  }

  struct Fit {
    double b0 = 0.0;
    Vector b;
    double kkt = 0.0;
  };

  Fit solve(const OracleOptions& opt) const {
    const Index p = x_.cols();
    const double wsum = w_.sum();
    Vector wx2(p);
    for (Index j = 0; j < p; ++j) wx2(j) = (w_.array() * x_.col(j).array().square()).sum();

    Vector b = Vector::Zero(p);
    double b0 = w_.dot(y_) / wsum;
    Vector r = y_.array() - b0;
    std::vector<Index> last_support;
    double v = 0.0;
    for (long sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      const double shift = w_.dot(r) / wsum;
      b0 += shift;
      r.array() -= shift;
      for (Index j = 0; j < p; ++j) {
        if (!(wx2(j) > 0.0)) continue;
        const double z = (w_.array() * x_.col(j).array() * r.array()).sum() + wx2(j) * b(j);
        const double t = shrink(z, lambda_) / wx2(j);
        if (t != b(j)) {
          r -= (t - b(j)) * x_.col(j);
          b(j) = t;
        }
      }
      if (sweep % 8 == 7) r = residual(b0, b);
      v = kkt(b0, b);
      if (v <= opt.tol) return {b0, b, v};

      std::vector<Index> support;
      for (Index j = 0; j < p; ++j)
        if (b(j) != 0.0) support.push_back(j);
      if (support == last_support) {
        Fit f;
        if (closed_form(support, b, f) && f.kkt <= opt.tol) return f;
      }
      last_support = std::move(support);
    }
    throw ConvergenceError("oracle coordinate descent did not converge", v);
  }

 private:
  static double shrink(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

  Vector residual(double b0, const Vector& b) const {
    Vector r = y_ - x_ * b;
    r.array() -= b0;
    return r;
  }

  /// Weighted normal equations with the intercept on a fixed support/sign
  /// pattern, solved by full-pivot LU.
  bool closed_form(const std::vector<Index>& support, const Vector& b, Fit& out) const {
    const auto m = static_cast<Index>(support.size());
    Matrix z(x_.rows(), m + 1);
    z.col(0).setOnes();
    Vector s(m + 1);
    s(0) = 0.0;
    for (Index c = 0; c < m; ++c) {
      z.col(c + 1) = x_.col(support[static_cast<std::size_t>(c)]);
      s(c + 1) = b(support[static_cast<std::size_t>(c)]) > 0 ? 1.0 : -1.0;
    }
    const Matrix zw = z.transpose() * w_.asDiagonal();
    const Matrix lhs = zw * z;
    const Vector rhs = zw * y_ - lambda_ * s;
    Eigen::FullPivLU<Matrix> lu(lhs);
    if (!lu.isInvertible()) return false;
    const Vector sol = lu.solve(rhs);
    out.b = Vector::Zero(x_.cols());
    out.b0 = sol(0);
    for (Index c = 0; c < m; ++c) {
      if ((sol(c + 1) > 0 ? 1.0 : -1.0) != s(c + 1) || sol(c + 1) == 0.0) return false;
      out.b(support[static_cast<std::size_t>(c)]) = sol(c + 1);
    }
    out.kkt = kkt(out.b0, out.b);
    return true;
  }

  Matrix x_;
  Vector y_;
  Vector w_;
  double lambda_;
};

namespace detail {

inline LassoSolution to_solution(const Dataset& data, double lambda, const WeightedProblem::Fit& f) {
  LassoSolution s;
  s.lambda = lambda;
  s.beta0 = f.b0;
  s.beta = f.b;
  for (Index j = 0; j < f.b.size(); ++j)
    if (f.b(j) != 0.0) s.active_set.push_back(j);
  s.fitted = (data.x() * f.b).array() + f.b0;
  s.signs = f.b.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
  s.kkt_violation = f.kkt;
  return s;
}

}  // namespace detail

/// Direct minimization of 1/2 sum_{i != k} r_i^2 + omega/2 r_k^2 + lambda |b|_1.
/// Fitted values cover all n rows.
inline LassoSolution weighted_lasso_refit(const Dataset& data, double lambda, Index k, double omega,
                                          const OracleOptions& opt = {}) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw InputError("omega must lie in [0, 1]");
  if (k < 0 || k >= data.n()) throw InputError("case index out of range");
  Vector w = Vector::Ones(data.n());
  w(k) = omega;
  const WeightedProblem problem(data.x(), data.y(), std::move(w), lambda);
  return detail::to_solution(data, lambda, problem.solve(opt));
}

/// Unweighted fit of the full data through the same solver.
inline LassoSolution full_refit(const Dataset& data, double lambda, const OracleOptions& opt = {}) {
  const WeightedProblem problem(data.x(), data.y(), Vector::Ones(data.n()), lambda);
  return detail::to_solution(data, lambda, problem.solve(opt));
}

/// Row k physically removed and the remaining design re-centered; the fit is
/// mapped back to the parent's coordinates so fitted values cover all n rows.
inline LassoSolution deleted_lasso_refit(const Dataset& data, double lambda, Index k,
                                         const OracleOptions& opt = {}) {
  const Subset sub = drop_row(data, k);
  const WeightedProblem problem(sub.data.x(), sub.data.y(), Vector::Ones(sub.data.n()), lambda);
  WeightedProblem::Fit f = problem.solve(opt);
  // child x = parent x - shift  =>  parent intercept = b0 - shift'b
  f.b0 -= sub.shift.dot(f.b);
  return detail::to_solution(data, lambda, f);
}

/// ||yhat_full - yhat_(k)||^2 / ((p + 1) s2) with both fits from refits.
inline double cooks_by_refit(const Dataset& data, double lambda, Index k, double s2,
                             const OracleOptions& opt = {}) {
  if (!(s2 > 0.0)) throw InputError("s2 must be positive");
  const LassoSolution full = full_refit(data, lambda, opt);
  const LassoSolution del = weighted_lasso_refit(data, lambda, k, 0.0, opt);
  return (full.fitted - del.fitted).squaredNorm() / (static_cast<double>(data.p() + 1) * s2);
}

/// All n refit distances, sharing the full fit.
inline Vector cooks_by_refit_all(const Dataset& data, double lambda, double s2, const OracleOptions& opt = {}) {
  if (!(s2 > 0.0)) throw InputError("s2 must be positive");
  const LassoSolution full = full_refit(data, lambda, opt);
  Vector out(data.n());
  for (Index k = 0; k < data.n(); ++k) {
    const LassoSolution del = weighted_lasso_refit(data, lambda, k, 0.0, opt);
    out(k) = (full.fitted - del.fitted).squaredNorm() / (static_cast<double>(data.p() + 1) * s2);
  }
  return out;
}

/// Mean squared leave-one-out error by n refits.
inline double loo_error_by_refit(const Dataset& data, double lambda, const OracleOptions& opt = {}) {
  double acc = 0.0;
  for (Index k = 0; k < data.n(); ++k) {
    const LassoSolution del = weighted_lasso_refit(data, lambda, k, 0.0, opt);
    const double e = data.y()(k) - del.fitted(k);
    acc += e * e;
  }
  return acc / static_cast<double>(data.n());
}

}  // namespace caselasso::oracle
