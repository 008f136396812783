#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/gram.hpp"
#include "caselasso/lasso.hpp"
#include "caselasso/types.hpp"

namespace caselasso {

struct LambdaKnot {
  double lambda = 0.0;
  Vector beta;
  double l1 = 0.0;
  /// Event that created this knot (kTerminal for the first and last knots).
  PathEvent event;
};

/// Piecewise-linear regular Lasso path in lambda, knots in decreasing lambda.
struct LambdaPath {
  std::vector<LambdaKnot> knots;
  double lambda_max = 0.0;
  double denominator_norm = 0.0;
  bool denominator_from_ols = false;

  double min_lambda() const { return knots.back().lambda; }
};

/// LARS with the lasso modification: one add or drop per knot, ties broken by
/// the smallest column index. The path runs until lambda = 0 or until no
/// further event exists (saturation at n - 1 active variables when p >= n).
inline LambdaPath lambda_path(const Dataset& data) {
  const Index n = data.n();
  const Index p = data.p();
  const Matrix& x = data.x();
  const Vector yc = data.y().array() - data.y_mean();
  const Vector xty = x.transpose() * yc;

  LambdaPath path;
  LambdaKnot first;
  first.beta = Vector::Zero(p);
  Index start = -1;
  double lmax = 0.0;
  for (Index j = 0; j < p; ++j) {
    if (std::abs(xty(j)) > lmax) {
      lmax = std::abs(xty(j));
      start = j;
    }
  }
  path.lambda_max = lmax;
  first.lambda = lmax;
  path.knots.push_back(first);
  if (start < 0 || !(lmax > 0.0)) {
    path.knots.back().lambda = 0.0;
    return path;
  }

  GramState gram;
  Vector signs = Vector::Zero(p);
  gram.add(data, start);
  signs(start) = detail::sign(xty(start));
  path.knots.back().event = {xty(start) > 0 ? EventKind::kAddPositive : EventKind::kAddNegative, start};

  double lambda = lmax;
  // the event undoing the last change sits at the current knot
  PathEvent blocked{EventKind::kDrop, start};
  const Index max_active = std::min(p, n - 1);
  const long max_steps = 50L * std::max(n, p) + 100;
  for (long step = 0; step < max_steps; ++step) {
    const auto& active = gram.active();
    const Vector sa = gather(signs, active);
    const Vector g = gram.inverse() * gather(xty, active);
    const Vector u = gram.inverse() * sa;
    const Matrix xa = gather_columns(x, active);
    // c(l) = X'(y - X_A (g - l u)) = a + l b
    const Vector fit_g = xa * g;
    const Vector fit_u = xa * u;
    const Vector a = xty - x.transpose() * fit_g;
    const Vector b = x.transpose() * fit_u;

    std::vector<char> is_active(static_cast<std::size_t>(p), 0);
    for (Index j : active) is_active[static_cast<std::size_t>(j)] = 1;

    double best = 0.0;
    PathEvent event{EventKind::kTerminal, -1};
    const double ceiling = lambda * (1.0 - 1e-12);
    auto consider = [&](double cand, PathEvent ev) {
      if (!(cand > 0.0) || !(cand < ceiling)) return;
      if (cand > best * (1.0 + 1e-13) || event.kind == EventKind::kTerminal) {
        best = cand;
        event = ev;
      } else if (cand >= best * (1.0 - 1e-13) && ev.variable < event.variable) {
        best = std::max(best, cand);
        event = ev;
      }
    };
    if (gram.size() < max_active) {
      for (Index j = 0; j < p; ++j) {
        if (is_active[static_cast<std::size_t>(j)]) continue;
        if (!(data.column_sq_norms()(j) > 0.0)) continue;
        const bool block = j == blocked.variable;
        if (std::abs(1.0 - b(j)) > 1e-14 && !(block && blocked.kind == EventKind::kAddPositive))
          consider(a(j) / (1.0 - b(j)), {EventKind::kAddPositive, j});
        if (std::abs(1.0 + b(j)) > 1e-14 && !(block && blocked.kind == EventKind::kAddNegative))
          consider(-a(j) / (1.0 + b(j)), {EventKind::kAddNegative, j});
      }
    }
    for (std::size_t c = 0; c < active.size(); ++c) {
      const Index j = active[c];
      if (j == blocked.variable && blocked.kind == EventKind::kDrop) continue;
      const double uc = u(static_cast<Index>(c));
      if (uc != 0.0) consider(g(static_cast<Index>(c)) / uc, {EventKind::kDrop, j});
    }

    const double next = event.kind == EventKind::kTerminal ? 0.0 : best;
    LambdaKnot knot;
    knot.lambda = next;
    knot.beta = Vector::Zero(p);
    for (std::size_t c = 0; c < active.size(); ++c)
      knot.beta(active[c]) = g(static_cast<Index>(c)) - next * u(static_cast<Index>(c));
    knot.event = event;
    if (event.kind == EventKind::kDrop) knot.beta(event.variable) = 0.0;
    knot.l1 = knot.beta.lpNorm<1>();
    path.knots.push_back(std::move(knot));
    lambda = next;
    if (event.kind == EventKind::kTerminal) break;

    blocked = {EventKind::kDrop, event.variable};
    if (event.kind == EventKind::kDrop) {
      blocked.kind = signs(event.variable) > 0.0 ? EventKind::kAddPositive : EventKind::kAddNegative;
      gram.drop(event.variable, data);
      signs(event.variable) = 0.0;
    } else {
      try {
        gram.add(data, event.variable);
      } catch (const SingularUpdateError&) {
        // Column in the span of the active set: the fit is saturated.
        path.knots.back().event = {EventKind::kTerminal, -1};
        break;
      }
      signs(event.variable) = event.kind == EventKind::kAddPositive ? 1.0 : -1.0;
    }
    if (step + 1 == max_steps) throw NumericalError("lambda path did not terminate");
  }

  path.denominator_norm = path.knots.back().l1;
  if (n > p + 1) {
    try {
      path.denominator_norm = ols_fit(data).l1_norm();
      path.denominator_from_ols = true;
    } catch (const Error&) {
      path.denominator_from_ols = false;
    }
  }
  return path;
}

/// Coefficients at `lambda` by linear interpolation between knots.
inline Vector beta_at(const LambdaPath& path, double lambda) {
  const auto& k = path.knots;
  if (lambda >= k.front().lambda) return k.front().beta;
  if (lambda <= k.back().lambda) return k.back().beta;
  for (std::size_t m = 0; m + 1 < k.size(); ++m) {
    const double hi = k[m].lambda;
    const double lo = k[m + 1].lambda;
    if (lambda <= hi && lambda >= lo) {
      if (hi == lo) return k[m + 1].beta;
      const double t = (hi - lambda) / (hi - lo);
      Vector b = k[m].beta + t * (k[m + 1].beta - k[m].beta);
      // exact zeros for variables inactive on this piece
      for (Index j = 0; j < b.size(); ++j)
        if (k[m].beta(j) == 0.0 && k[m + 1].beta(j) == 0.0) b(j) = 0.0;
      return b;
    }
  }
  return k.back().beta;
}

inline double fraction_of(const LambdaPath& path, double lambda) {
  if (!(path.denominator_norm > 0.0)) return 0.0;
  return beta_at(path, lambda).lpNorm<1>() / path.denominator_norm;
}

struct FractionLambda {
  double lambda = 0.0;
  bool clamped = false;
};

/// Lambda whose l1-norm fraction equals rho, interpolating the (piecewise
/// linear, decreasing in lambda) l1 norm between knots. rho = 0 gives
/// lambda_max. Requests above the attainable fraction clamp to the smallest
/// knot lambda and set `clamped`.
inline FractionLambda lambda_at_fraction(const LambdaPath& path, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InputError("fraction must lie in [0, 1]");
  const auto& k = path.knots;
  if (rho == 0.0 || !(path.denominator_norm > 0.0)) return {path.lambda_max, false};
  const double target = rho * path.denominator_norm;
  for (std::size_t m = 0; m + 1 < k.size(); ++m) {
    const double a = k[m].l1;
    const double b = k[m + 1].l1;
    if (target >= a && target <= b) {
      if (b == a) return {k[m + 1].lambda, false};
      const double t = (target - a) / (b - a);
      return {k[m].lambda + t * (k[m + 1].lambda - k[m].lambda), false};
    }
  }
  if (target <= k.front().l1) return {k.front().lambda, false};
  const bool reached = std::abs(k.back().l1 - target) <= 1e-12 * std::max(1.0, target);
  return {k.back().lambda, !reached};
}

/// Exact solution at `lambda` read off the path (interpolation, then the
/// closed form on the interpolated support). Falls back to coordinate descent
/// if the check fails.
inline LassoSolution solution_at(const Dataset& data, const LambdaPath& path, double lambda,
                                 double tol = 1e-8) {
  const Vector guess = beta_at(path, lambda);
  const auto support = detail::support(guess);
  Vector signs = Vector::Zero(data.p());
  for (Index j : support) signs(j) = detail::sign(guess(j));
  if (auto exact = solve_on_active(data, lambda, support, signs)) {
    LassoSolution s = make_solution(data, lambda, data.y_mean(), std::move(*exact));
    if (s.kkt_violation <= tol) return s;
  }
  FitOptions opt;
  opt.tol = tol;
  opt.warm_start = &guess;
  return fit_lasso(data, lambda, opt);
}

}  // namespace caselasso
