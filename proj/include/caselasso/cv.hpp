#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/lambda_path.hpp"
#include "caselasso/lasso.hpp"
#include "caselasso/parallel.hpp"
#include "caselasso/weight_path.hpp"

namespace caselasso {

/// `count` equispaced fractions on [0, 1], endpoints included.
inline std::vector<double> fraction_grid(std::size_t count = 101) {
  if (count < 2) throw InputError("fraction grid needs at least 2 points");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  g.back() = 1.0;
  return g;
}

struct CvCurve {
  std::vector<double> fractions;  // empty for lambda grids
  std::vector<double> lambdas;    // full-data lambda per grid point
  std::vector<double> mse;
  std::size_t best = 0;
  double lambda_hat = 0.0;
  double fraction_hat = 0.0;
  std::uint64_t seed = 0;
  int folds = 0;
};

namespace detail {

/// Index of the smallest value; exact ties keep the earliest entry.
inline std::size_t argmin_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}

/// Index of the smallest value; ties go to the larger lambda.
inline std::size_t argmin_larger_lambda(const std::vector<double>& mse, const std::vector<double>& lambdas) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < mse.size(); ++i)
    if (mse[i] < mse[best] || (mse[i] == mse[best] && lambdas[i] > lambdas[best])) best = i;
  return best;
}

inline void check_fractions(const std::vector<double>& fractions) {
  if (fractions.empty()) throw InputError("empty fraction grid");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] >= 0.0 && fractions[i] <= 1.0)) throw InputError("fractions must lie in [0, 1]");
    if (i > 0 && !(fractions[i] > fractions[i - 1])) throw InputError("fraction grid must be ascending");
  }
}

}  // namespace detail

/// Mean squared leave-one-out error at one lambda, from the n weight paths.
inline double loo_error(const Dataset& data, double lambda, const LassoSolution& full) {
  const auto paths = compute_all_paths(data, lambda, full);
  double acc = 0.0;
  for (const auto& path : paths) {
    const double e = residual_at(path, 0.0);
    acc += e * e;
  }
  return acc / static_cast<double>(data.n());
}

/// Leave-one-out error curve over an explicit lambda grid.
inline std::vector<double> loo_cv_lambdas(const Dataset& data, const std::vector<double>& lambdas) {
  const LambdaPath path = lambda_path(data);
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw InputError("lambda must be nonnegative");
    out[i] = loo_error(data, lambdas[i], solution_at(data, path, lambdas[i]));
  }
  return out;
}

/// Leave-one-out error curve over a fraction grid of the full-data path.
inline CvCurve loo_cv(const Dataset& data, const std::vector<double>& fractions) {
  detail::check_fractions(fractions);
  const LambdaPath path = lambda_path(data);
  CvCurve curve;
  curve.fractions = fractions;
  curve.folds = static_cast<int>(data.n());
  for (double rho : fractions) {
    const double lambda = lambda_at_fraction(path, rho).lambda;
    curve.lambdas.push_back(lambda);
    curve.mse.push_back(loo_error(data, lambda, solution_at(data, path, lambda)));
  }
  curve.best = detail::argmin_first(curve.mse);
  curve.lambda_hat = curve.lambdas[curve.best];
  curve.fraction_hat = fractions[curve.best];
  return curve;
}

/// Fold label per case: seeded uniform shuffle, then K contiguous blocks.
inline std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) throw InputError("fold count must lie in [2, n]");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  for (Index pos = 0; pos < n; ++pos)
    label[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] =
        static_cast<int>(pos * folds / n);
  return label;
}

namespace detail {

struct FoldSplit {
  Subset train;
  std::vector<Index> test;
};

inline std::vector<FoldSplit> make_folds(const Dataset& data, const std::vector<int>& label, int folds) {
  std::vector<FoldSplit> out(static_cast<std::size_t>(folds));
  std::vector<std::vector<Index>> train(static_cast<std::size_t>(folds));
  for (Index i = 0; i < data.n(); ++i) {
    const int f = label[static_cast<std::size_t>(i)];
    for (int g = 0; g < folds; ++g) {
      if (g == f)
        out[static_cast<std::size_t>(g)].test.push_back(i);
      else
        train[static_cast<std::size_t>(g)].push_back(i);
    }
  }
  for (int g = 0; g < folds; ++g) {
    if (out[static_cast<std::size_t>(g)].test.empty()) throw InputError("fold " + std::to_string(g) + " is empty");
    out[static_cast<std::size_t>(g)].train = make_subset(data, train[static_cast<std::size_t>(g)]);
  }
  return out;
}

/// Sum of squared prediction errors of (beta0, beta), fitted on `split.train`,
/// over the held-out rows.
inline double fold_sse(const Dataset& data, const FoldSplit& split, double beta0, const Vector& beta) {
  double acc = 0.0;
  for (Index i : split.test) {
    const double pred = beta0 + split.train.local_row(data, i).dot(beta);
    const double e = data.y()(i) - pred;
    acc += e * e;
  }
  return acc;
}

}  // namespace detail

/// K-fold CV over a fraction grid with given fold labels; each training fold
/// maps the grid through its own path. lambda_hat is the full-data lambda at
/// the selected fraction.
inline CvCurve kfold_cv(const Dataset& data, const std::vector<int>& label, int folds,
                        const std::vector<double>& fractions) {
  detail::check_fractions(fractions);
  if (static_cast<Index>(label.size()) != data.n()) throw InputError("one fold label per case required");
  for (int f : label)
    if (f < 0 || f >= folds) throw InputError("fold label " + std::to_string(f) + " outside [0, folds)");
  const auto splits = detail::make_folds(data, label, folds);
  std::vector<std::vector<double>> sse(splits.size(), std::vector<double>(fractions.size(), 0.0));
  parallel_for(splits.size(), [&](std::size_t f) {
    const auto& split = splits[f];
    const LambdaPath path = lambda_path(split.train.data);
    for (std::size_t g = 0; g < fractions.size(); ++g) {
      const double lambda = lambda_at_fraction(path, fractions[g]).lambda;
      sse[f][g] = detail::fold_sse(data, split, split.train.data.y_mean(), beta_at(path, lambda));
    }
  });

  CvCurve curve;
  curve.fractions = fractions;
  curve.folds = folds;
  curve.mse.assign(fractions.size(), 0.0);
  for (std::size_t g = 0; g < fractions.size(); ++g) {
    for (std::size_t f = 0; f < splits.size(); ++f) curve.mse[g] += sse[f][g];
    curve.mse[g] /= static_cast<double>(data.n());
  }
  const LambdaPath full = lambda_path(data);
  for (double rho : fractions) curve.lambdas.push_back(lambda_at_fraction(full, rho).lambda);
  curve.best = detail::argmin_first(curve.mse);
  curve.lambda_hat = curve.lambdas[curve.best];
  curve.fraction_hat = fractions[curve.best];
  return curve;
}

inline CvCurve kfold_cv(const Dataset& data, int folds, const std::vector<double>& fractions, std::uint64_t seed) {
  CvCurve curve = kfold_cv(data, fold_assignment(data.n(), folds, seed), folds, fractions);
  curve.seed = seed;
  return curve;
}

/// K-fold CV over an explicit lambda grid (same lambda on every fold).
inline CvCurve kfold_cv_lambdas(const Dataset& data, int folds, const std::vector<double>& lambdas,
                                std::uint64_t seed) {
  if (lambdas.empty()) throw InputError("empty lambda grid");
  const auto label = fold_assignment(data.n(), folds, seed);
  const auto splits = detail::make_folds(data, label, folds);
  std::vector<std::vector<double>> sse(splits.size(), std::vector<double>(lambdas.size(), 0.0));
  parallel_for(splits.size(), [&](std::size_t f) {
    const auto& split = splits[f];
    const LambdaPath path = lambda_path(split.train.data);
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
      const LassoSolution s = solution_at(split.train.data, path, lambdas[g]);
      sse[f][g] = detail::fold_sse(data, split, s.beta0, s.beta);
    }
  });
  CvCurve curve;
  curve.lambdas = lambdas;
  curve.seed = seed;
  curve.folds = folds;
  curve.mse.assign(lambdas.size(), 0.0);
  for (std::size_t g = 0; g < lambdas.size(); ++g) {
    for (std::size_t f = 0; f < splits.size(); ++f) curve.mse[g] += sse[f][g];
    curve.mse[g] /= static_cast<double>(data.n());
  }
  curve.best = detail::argmin_larger_lambda(curve.mse, curve.lambdas);
  curve.lambda_hat = curve.lambdas[curve.best];
  const LambdaPath full = lambda_path(data);
  curve.fraction_hat = fraction_of(full, curve.lambda_hat);
  return curve;
}

}  // namespace caselasso
