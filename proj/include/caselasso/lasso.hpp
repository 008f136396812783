#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/gram.hpp"
#include "caselasso/types.hpp"

namespace caselasso {

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Max KKT residual of (beta0, beta) for  1/2 RSS + lambda |beta|_1 :
/// max{ |d0|, max_{j in A} |d_j + lambda sign(beta_j)|, max_{j not in A} (|d_j| - lambda)_+ }
/// where d0 = -1'r and d = -X'r.
inline double kkt_violation(const Dataset& data, double lambda, double beta0, const Vector& beta) {
  const Vector r = data.y() - (data.x() * beta).array().matrix() - Vector::Constant(data.n(), beta0);
  const Vector d = -(data.x().transpose() * r);
  double v = std::abs(r.sum());
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0)
      v = std::max(v, std::abs(d(j) + lambda * detail::sign(beta(j))));
    else
      v = std::max(v, std::abs(d(j)) - lambda);
  }
  return v;
}

inline double kkt_check(const Dataset& data, const LassoSolution& solution, double lambda) {
  return kkt_violation(data, lambda, solution.beta0, solution.beta);
}

/// Assembles a LassoSolution (support, subgradient, fitted values, KKT
/// residual) from coefficients.
inline LassoSolution make_solution(const Dataset& data, double lambda, double beta0, Vector beta) {
  LassoSolution s;
  s.lambda = lambda;
  s.beta0 = beta0;
  s.beta = std::move(beta);
  s.active_set = detail::support(s.beta);
  s.fitted = (data.x() * s.beta).array() + beta0;
  const Vector d = -(data.x().transpose() * (data.y() - s.fitted));
  s.signs.resize(data.p());
  for (Index j = 0; j < data.p(); ++j) {
    if (s.beta(j) != 0.0)
      s.signs(j) = detail::sign(s.beta(j));
    else
      s.signs(j) = lambda > 0.0 ? -d(j) / lambda : 0.0;
  }
  s.kkt_violation = kkt_violation(data, lambda, beta0, s.beta);
  return s;
}

/// Closed-form fit on a given active set and sign pattern:
/// beta_A = (X_A'X_A)^{-1}(X_A'y - lambda s_A), beta0 = ybar.
/// Returns nullopt when the Gram matrix is singular or the signs disagree.
inline std::optional<Vector> solve_on_active(const Dataset& data, double lambda,
                                             const std::vector<Index>& active, const Vector& signs) {
  Vector beta = Vector::Zero(data.p());
  if (active.empty()) return beta;
  const Matrix xa = gather_columns(data.x(), active);
  const Matrix gram = xa.transpose() * xa;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vector rhs = xa.transpose() * data.y() - lambda * gather(signs, active);
  const Vector ba = llt.solve(rhs);
  for (std::size_t c = 0; c < active.size(); ++c) {
    const double v = ba(static_cast<Index>(c));
    if (detail::sign(v) != signs(active[c])) return std::nullopt;
    beta(active[c]) = v;
  }
  return beta;
}

struct FitOptions {
  double tol = 1e-8;
  long max_sweeps = 100000;
  const Vector* warm_start = nullptr;
};

/// Regular Lasso at fixed lambda:  min 1/2 |y - b0 - X b|^2 + lambda |b|_1
/// with an unpenalized intercept. Cyclic coordinate descent with
/// soft-thresholding; whenever the support is stable across a sweep the
/// closed-form solution on that support is tried and accepted if it passes
/// the KKT check. Convergence is declared on KKT violation <= tol.
inline LassoSolution fit_lasso(const Dataset& data, double lambda, const FitOptions& opt = {}) {
  if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
  if (!(opt.tol > 0.0)) throw InputError("tol must be positive");
  const Index n = data.n();
  const Index p = data.p();
  const Matrix& x = data.x();
  const Vector& norms = data.column_sq_norms();
  const double beta0 = data.y_mean();

  Vector beta = Vector::Zero(p);
  if (opt.warm_start != nullptr && opt.warm_start->size() == p) beta = *opt.warm_start;
  Vector r = data.y().array() - beta0;
  if (beta.squaredNorm() > 0.0) r.noalias() -= x * beta;

  std::vector<Index> previous_support = detail::support(beta);
  double violation = kInf;
  for (long sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (Index j = 0; j < p; ++j) {
      if (!(norms(j) > 0.0)) continue;
      const double old = beta(j);
      const double z = x.col(j).dot(r) + norms(j) * old;
      const double next = soft_threshold(z, lambda) / norms(j);
      if (next != old) {
        r.noalias() -= (next - old) * x.col(j);
        beta(j) = next;
      }
    }
    // Fresh residual every few sweeps keeps drift out of the KKT test.
    if (sweep % 16 == 15) r = data.y().array() - beta0 - (x * beta).array();
    violation = kkt_violation(data, lambda, beta0, beta);
    if (violation <= opt.tol) return make_solution(data, lambda, beta0, std::move(beta));

    std::vector<Index> support = detail::support(beta);
    if (support == previous_support) {
      Vector signs = Vector::Zero(p);
      for (Index j : support) signs(j) = detail::sign(beta(j));
      if (auto polished = solve_on_active(data, lambda, support, signs)) {
        const double v = kkt_violation(data, lambda, beta0, *polished);
        if (v <= opt.tol) return make_solution(data, lambda, beta0, std::move(*polished));
      }
    }
    previous_support = std::move(support);
  }
  (void)n;
  throw ConvergenceError("coordinate descent did not converge (kkt violation " +
                             std::to_string(violation) + ")",
                         violation);
}

/// Least squares with intercept. Requires n > p + 1 and a full-rank design.
inline LassoSolution ols_fit(const Dataset& data) {
  const Index n = data.n();
  const Index p = data.p();
  if (n <= p + 1) throw InputError("OLS needs n > p + 1");
  Eigen::ColPivHouseholderQR<Matrix> qr(data.x());
  if (qr.rank() < p) throw NumericalError("design matrix is rank deficient");
  Vector beta = qr.solve(Vector(data.y().array() - data.y_mean()));
  LassoSolution s = make_solution(data, 0.0, data.y_mean(), std::move(beta));
  s.kkt_violation = 0.0;
  return s;
}

struct VarianceEstimate {
  double s2 = 0.0;
  VarianceMode mode = VarianceMode::kOls;
  Index df = 0;
  bool degenerate = false;
};

/// Error-variance estimate used to normalize Cook's distances. `ols`:
/// RSS_OLS / (n - p - 1). `lasso_df`: RSS at `solution` / (n - |A| - 1).
inline VarianceEstimate variance_estimate(const Dataset& data, VarianceMode mode,
                                          const LassoSolution* solution = nullptr) {
  VarianceEstimate v;
  v.mode = mode;
  double rss = 0.0;
  if (mode == VarianceMode::kOls) {
    v.df = data.n() - data.p() - 1;
    if (v.df <= 0) throw InputError("OLS variance needs n > p + 1");
    rss = (data.y() - ols_fit(data).fitted).squaredNorm();
  } else {
    if (solution == nullptr) throw InputError("lasso_df variance needs a fitted solution");
    v.df = data.n() - solution->active_size() - 1;
    if (v.df <= 0) throw InputError("nonpositive residual degrees of freedom");
    rss = (data.y() - solution->fitted).squaredNorm();
  }
  v.s2 = rss / static_cast<double>(v.df);
  const double scale = std::max(1.0, data.y().squaredNorm());
  v.degenerate = !(rss > 1e-24 * scale);
  if (v.degenerate) v.s2 = 0.0;
  return v;
}

/// Default error variance: OLS MSE when n > p + 1, else the lasso_df estimate
/// at `solution`.
inline VarianceEstimate default_variance(const Dataset& data, const LassoSolution& solution) {
  if (data.n() > data.p() + 1) {
    try {
      return variance_estimate(data, VarianceMode::kOls);
    } catch (const NumericalError&) {
      // rank-deficient design: fall through
    }
  }
  return variance_estimate(data, VarianceMode::kLassoDf, &solution);
}

}  // namespace caselasso
