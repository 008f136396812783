#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "caselasso/cv.hpp"
#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/gram.hpp"
#include "caselasso/lambda_path.hpp"
#include "caselasso/lasso.hpp"
#include "caselasso/parallel.hpp"
#include "caselasso/types.hpp"
#include "caselasso/weight_path.hpp"

namespace caselasso {

/// Upper 5% point of the chi-square distribution with one degree of freedom.
inline constexpr double kChiSquare95 = 3.8414588206941245;

namespace detail {

inline double normalizer(const Dataset& data, double s2) {
  if (!(s2 > 0.0)) throw InputError("s2 must be positive");
  return static_cast<double>(data.p() + 1) * s2;
}

}  // namespace detail

/// D_k(lambda, omega) along an already computed path.
inline double influence_on_path(const WeightPath& path, double omega, double norm) {
  return (path.full_fitted - fitted_at(path, omega)).squaredNorm() / norm;
}

inline double cooks_on_path(const WeightPath& path, double norm) {
  return (path.full_fitted - path.segments.back().fitted_at_lo).squaredNorm() / norm;
}

/// D_k(lambda, omega) = |yhat(lambda) - yhat^omega|^2 / ((p + 1) s2) at each
/// requested omega, from a single path.
inline std::vector<double> case_influence_function(const Dataset& data, double lambda, Index k, double s2,
                                                   const std::vector<double>& omegas) {
  const double norm = detail::normalizer(data, s2);
  const LassoSolution full = fit_lasso(data, lambda);
  const WeightPath path = compute_path(data, lambda, k, full);
  std::vector<double> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    if (!(w >= 0.0 && w <= 1.0)) throw InputError("omega must lie in [0, 1]");
    out.push_back(w == 1.0 ? 0.0 : influence_on_path(path, w, norm));
  }
  return out;
}

/// Exact Cook's distance for every case at one lambda.
inline Vector cooks_distances(const Dataset& data, double lambda, double s2, const LassoSolution& full,
                              std::vector<std::size_t>* updates = nullptr) {
  const double norm = detail::normalizer(data, s2);
  const PathContext context = make_context(data, lambda, full);
  PathOptions options;
  options.context = &context;
  Vector d(data.n());
  std::vector<std::size_t> counts(static_cast<std::size_t>(data.n()), 0);
  // each path is dropped once its distance is read
  parallel_for(counts.size(), [&](std::size_t k) {
    const WeightPath path = compute_path(data, lambda, static_cast<Index>(k), full, options);
    d(static_cast<Index>(k)) = cooks_on_path(path, norm);
    counts[k] = path.update_count();
  });
  if (updates != nullptr) *updates = std::move(counts);
  return d;
}

inline double cooks_distance(const Dataset& data, double lambda, Index k, double s2) {
  const double norm = detail::normalizer(data, s2);
  const LassoSolution full = fit_lasso(data, lambda);
  return cooks_on_path(compute_path(data, lambda, k, full), norm);
}

namespace detail {

struct FitDiagnostics {
  Vector residual;
  Vector leverage;
};

inline FitDiagnostics diagnostics(const Dataset& data, const LassoSolution& full) {
  const GramState gram = GramState::build(data, full.active_set);
  FitDiagnostics d;
  d.residual = data.y() - full.fitted;
  d.leverage = gram.hat_diagonal(data);
  if (full.active_size() + 1 >= data.n()) d.leverage.setOnes();
  return d;
}

}  // namespace detail

/// Closed form r^2 h / ((p + 1) s2 (1 - h)^2) on the lambda-fit active set.
inline double cooks_distance_approx(const Dataset& data, double lambda, Index k, double s2) {
  if (k < 0 || k >= data.n()) throw InputError("case index out of range");
  const double norm = detail::normalizer(data, s2);
  const LassoSolution full = fit_lasso(data, lambda);
  const auto q = hat_quantities(data, full.active_set, k);
  const double h = full.active_size() + 1 >= data.n() ? 1.0 : q.h_kk;
  if (h >= 1.0) throw NumericalError("leverage is 1: approximate Cook's distance undefined");
  const double r = data.y()(k) - full.fitted(k);
  return r * r * h / (norm * (1.0 - h) * (1.0 - h));
}

/// h r^2 / ((p + 1) s2).
inline double local_influence(const Dataset& data, double lambda, Index k, double s2) {
  if (k < 0 || k >= data.n()) throw InputError("case index out of range");
  const double norm = detail::normalizer(data, s2);
  const LassoSolution full = fit_lasso(data, lambda);
  const double h = hat_quantities(data, full.active_set, k).h_kk;
  const double r = data.y()(k) - full.fitted(k);
  return h * r * r / norm;
}

/// Derivative of the fitted values in omega at omega = 1: h_col * r.
inline Vector sensitivity(const Dataset& data, double lambda, Index k) {
  if (k < 0 || k >= data.n()) throw InputError("case index out of range");
  const LassoSolution full = fit_lasso(data, lambda);
  const auto q = hat_quantities(data, full.active_set, k);
  return q.h_col * (data.y()(k) - full.fitted(k));
}

/// Sample variance (denominator m - 1) of `d`, optionally leaving one entry out.
inline double sample_variance(const Vector& d, std::optional<Index> skip = std::nullopt) {
  // shifted by one member so that identical values give exactly zero
  Index first = 0;
  if (skip && *skip == 0) first = 1;
  const double shift = d.size() > first ? d(first) : 0.0;
  double sum = 0.0;
  Index m = 0;
  for (Index i = 0; i < d.size(); ++i) {
    if (skip && *skip == i) continue;
    sum += d(i) - shift;
    ++m;
  }
  if (m < 2) throw InputError("variance needs at least 2 values");
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    if (skip && *skip == i) continue;
    const double e = d(i) - shift - mean;
    ss += e * e;
  }
  return ss / static_cast<double>(m - 1);
}

/// chi2_{0.95,1} * sqrt(Var(D) / 2). Zero variance yields 0 (nothing flagged).
inline double threshold(const Vector& distances, ThresholdMode mode = ThresholdMode::kPooled,
                        std::optional<Index> k = std::nullopt) {
  if (distances.size() < 3) throw InputError("threshold needs at least 3 distances");
  if (mode == ThresholdMode::kExternallyNormalized && !k)
    throw InputError("externally normalized threshold needs a case index");
  const double var = mode == ThresholdMode::kPooled ? sample_variance(distances) : sample_variance(distances, k);
  if (!(var > 0.0)) return 0.0;
  return kChiSquare95 * std::sqrt(var / 2.0);
}

/// Per-case thresholds for `mode` (all equal when pooled).
inline Vector thresholds(const Vector& distances, ThresholdMode mode) {
  Vector t(distances.size());
  if (mode == ThresholdMode::kPooled) {
    t.setConstant(threshold(distances));
  } else {
    for (Index k = 0; k < distances.size(); ++k) t(k) = threshold(distances, mode, k);
  }
  return t;
}

/// Strict D_k > T_k; T_k = 0 means the variance was zero and flags nothing.
inline bool exceeds(double distance, double t) { return t > 0.0 && distance > t; }

/// r / sqrt(s2 (1 - h)) on the lambda-fit active set.
inline Vector studentized_residuals(const Dataset& data, const LassoSolution& full, double s2) {
  if (!(s2 > 0.0)) throw InputError("s2 must be positive");
  const auto diag = detail::diagnostics(data, full);
  Vector out(data.n());
  for (Index k = 0; k < data.n(); ++k) {
    const double h = diag.leverage(k);
    if (h >= 1.0) throw NumericalError("leverage is 1: studentized residual undefined");
    out(k) = diag.residual(k) / std::sqrt(s2 * (1.0 - h));
  }
  return out;
}

inline Vector studentized_residuals(const Dataset& data, double lambda, double s2) {
  return studentized_residuals(data, fit_lasso(data, lambda), s2);
}

/// Full diagnostic table at one lambda.
inline std::vector<InfluenceRecord> influence_records(const Dataset& data, const LassoSolution& full, double s2,
                                                      ThresholdMode mode) {
  const double norm = detail::normalizer(data, s2);
  std::vector<std::size_t> updates;
  const Vector d = cooks_distances(data, full.lambda, s2, full, &updates);
  const Vector t = thresholds(d, mode);
  const auto diag = detail::diagnostics(data, full);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<InfluenceRecord> out(static_cast<std::size_t>(data.n()));
  for (Index k = 0; k < data.n(); ++k) {
    auto& rec = out[static_cast<std::size_t>(k)];
    const double h = diag.leverage(k);
    const double r = diag.residual(k);
    rec.case_index = k;
    rec.cooks_exact = d(k);
    rec.leverage = h;
    rec.local_influence = h * r * r / norm;
    rec.cooks_approx = h < 1.0 ? r * r * h / (norm * (1.0 - h) * (1.0 - h)) : nan;
    rec.studentized_residual = h < 1.0 ? r / std::sqrt(s2 * (1.0 - h)) : nan;
    rec.path_updates = updates[static_cast<std::size_t>(k)];
    rec.threshold = t(k);
    rec.flagged = exceeds(d(k), t(k));
  }
  return out;
}

struct DetectOptions {
  int folds = 10;
  std::uint64_t seed = 1;
  ThresholdMode threshold_mode = ThresholdMode::kPooled;
  std::size_t grid_points = 101;
};

/// Cross-validated lambda, full fit, n exact Cook's distances, threshold and
/// flags.
inline DetectionReport detect(const Dataset& data, const DetectOptions& opt = {}) {
  if (opt.folds < 2) throw InputError("detect needs at least 2 folds");
  const CvCurve cv = kfold_cv(data, opt.folds, fraction_grid(opt.grid_points), opt.seed);
  const LambdaPath path = lambda_path(data);
  const LassoSolution full = solution_at(data, path, cv.lambda_hat);
  const VarianceEstimate var = default_variance(data, full);
  if (var.degenerate || !(var.s2 > 0.0)) throw NumericalError("error variance estimate is zero");

  DetectionReport rep;
  rep.lambda_hat = cv.lambda_hat;
  rep.fraction_hat = cv.fraction_hat;
  rep.s2 = var.s2;
  rep.s2_mode = var.mode;
  rep.variance_mode = opt.threshold_mode;
  rep.seed = opt.seed;
  rep.folds = opt.folds;
  rep.records = influence_records(data, full, var.s2, opt.threshold_mode);
  Vector d(data.n());
  for (Index k = 0; k < data.n(); ++k) d(k) = rep.records[static_cast<std::size_t>(k)].cooks_exact;
  rep.threshold = threshold(d);
  return rep;
}

/// Exact distances over a fraction grid, with pooled threshold and mean
/// distance per grid point.
inline InfluenceGraph influence_graph(const Dataset& data, const std::vector<double>& fractions, double s2) {
  detail::check_fractions(fractions);
  if (!(s2 > 0.0)) throw InputError("s2 must be positive");
  const LambdaPath path = lambda_path(data);
  InfluenceGraph g;
  g.fractions = fractions;
  g.s2 = s2;
  g.lambdas.resize(fractions.size());
  g.distances.resize(static_cast<Index>(fractions.size()), data.n());
  g.thresholds.resize(fractions.size());
  g.d_bar.resize(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double lambda = lambda_at_fraction(path, fractions[i]).lambda;
    g.lambdas[i] = lambda;
    const LassoSolution full = solution_at(data, path, lambda);
    const Vector d = cooks_distances(data, lambda, s2, full);
    g.distances.row(static_cast<Index>(i)) = d.transpose();
    g.thresholds[i] = threshold(d);
    double sum = 0.0;
    for (Index k = 0; k < d.size(); ++k) sum += d(k);
    g.d_bar[i] = sum / static_cast<double>(d.size());
  }
  return g;
}

}  // namespace caselasso
