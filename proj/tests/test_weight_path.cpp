#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <caselasso/caselasso.hpp>

#include "support.hpp"

using namespace caselasso;
using testing_support::random_dataset;

namespace {

double lambda_fraction(const Dataset& d, double f) {
  const Vector xty = d.x().transpose() * (d.y().array() - d.y_mean()).matrix();
  return f * xty.cwiseAbs().maxCoeff();
}

}  // namespace

TEST(XiOfOmega, Endpoints) {
  EXPECT_EQ(xi_of_omega(1.0, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(xi_of_omega(0.0, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(xi_of_omega(0.25, 1.0), 1.0 / 0.25 - 1.0);
  EXPECT_TRUE(std::isinf(xi_of_omega(0.0, 1.0)));
  EXPECT_THROW(xi_of_omega(0.5, 1.5), InputError);
}

TEST(OmegaOfXi, RoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EXPECT_EQ(omega_of_xi(0.0, 0.4), 1.0);
  EXPECT_DOUBLE_EQ(omega_of_xi(2.0, 0.5), 0.0);
  for (int i = 0; i < 50; ++i) {
    const double w = u(rng);
    const double h = 0.05 + 0.9 * u(rng);
    EXPECT_NEAR(omega_of_xi(xi_of_omega(w, h), h), w, 1e-12);
  }
}

TEST(XiCandidates, ZeroResidualGivesSentinels) {
  const Dataset d = random_dataset(15, 6, 4);
  const double lambda = lambda_fraction(d, 0.3);
  const LassoSolution full = fit_lasso(d, lambda);
  const GramState gram = GramState::build(d, full.active_set);
  const Vector xty = d.x().transpose() * (d.y().array() - d.y_mean()).matrix();
  SegmentBasis basis = make_basis(d, gram, full.signs.unaryExpr([](double s) {
    return std::abs(s) == 1.0 ? s : 0.0;
  }), 0, lambda, xty);
  basis.residual = 0.0;
  const XiCandidates c = xi_candidates(d, basis, lambda);
  EXPECT_EQ(c.values.size(), full.active_size() + 2 * (d.p() - full.active_size()));
  for (Index i = 0; i < c.values.size(); ++i) EXPECT_TRUE(std::isinf(c.values(i)));
}

TEST(XiCandidates, FiniteCandidatesHitTheirBoundary) {
  const Dataset d = random_dataset(15, 6, 5);
  const double lambda = lambda_fraction(d, 0.3);
  const LassoSolution full = fit_lasso(d, lambda);
  const GramState gram = GramState::build(d, full.active_set);
  const Vector xty = d.x().transpose() * (d.y().array() - d.y_mean()).matrix();
  Vector signs = Vector::Zero(d.p());
  for (Index j : full.active_set) signs(j) = detail::sign(full.beta(j));
  int checked = 0;
  for (Index k = 0; k < d.n(); ++k) {
    const SegmentBasis basis = make_basis(d, gram, signs, k, lambda, xty);
    const XiCandidates c = xi_candidates(d, basis, lambda);
    for (Index i = 0; i < c.values.size(); ++i) {
      const double xi = c.values(i);
      if (std::isinf(xi)) continue;
      EXPECT_GT(xi, 0.0);
      const auto& tag = c.sources[static_cast<std::size_t>(i)];
      const Index j = tag.variable;
      const double scale = std::max(1.0, lambda);
      if (tag.source == CandidateSource::kBetaZero) {
        EXPECT_NEAR(basis.beta(xi)(j), 0.0, 1e-8 * scale);
      } else {
        const double dj = basis.d_hat(j) - xi * basis.v(j) * basis.residual;
        const double target = tag.source == CandidateSource::kHitsPlusLambda ? lambda : -lambda;
        EXPECT_NEAR(dj, target, 1e-8 * scale);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(XiCandidates, SaturatedInactiveBlockIsInfinite) {
  const Dataset d = random_dataset(8, 20, 6, 8, 0.5);
  const LambdaPath path = lambda_path(d);
  const double lambda = path.knots.back().lambda * 1.0001 + 1e-6;
  const LassoSolution full = solution_at(d, path, lambda);
  ASSERT_EQ(full.active_size(), d.n() - 1);
  const GramState gram = GramState::build(d, full.active_set);
  const Vector xty = d.x().transpose() * (d.y().array() - d.y_mean()).matrix();
  Vector signs = Vector::Zero(d.p());
  for (Index j : full.active_set) signs(j) = detail::sign(full.beta(j));
  const SegmentBasis basis = make_basis(d, gram, signs, 0, lambda, xty);
  EXPECT_DOUBLE_EQ(basis.h_kk, 1.0);
  const XiCandidates c = xi_candidates(d, basis, lambda);
  for (Index i = full.active_size(); i < c.values.size(); ++i) EXPECT_TRUE(std::isinf(c.values(i)));
}

TEST(ComputePath, ZeroRowIsConstant) {
  Dataset base = random_dataset(12, 3, 7);
  Matrix x(13, 3);
  x.topRows(12) = base.x();
  x.row(12).setZero();
  Vector y(13);
  y.head(12) = base.y();
  y(12) = 9.0;
  const Dataset d = center_dataset(x, y);
  ASSERT_LT(d.x().row(12).cwiseAbs().maxCoeff(), 1e-12);
  const double lambda = lambda_fraction(d, 0.2);
  const LassoSolution full = fit_lasso(d, lambda);
  const WeightPath path = compute_path(d, lambda, 12, full);
  EXPECT_EQ(path.update_count(), 0u);
  EXPECT_LT((path.loo_solution.beta - full.beta).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(path.loo_solution.beta0, y.head(12).mean(), 1e-10);
}

TEST(ComputePath, ZeroResidualIsConstant) {
  Matrix x(6, 2);
  x << -2, 1, -1, 0, 0, 2, 1, -1, 2, 0.5, 3, -1;
  Vector y(6);
  y << -4, -2, 0.5, 2, 4, 5;
  // fixed point of y_1 <- fitted_1 (contraction with factor h_11 < 1)
  for (int it = 0; it < 400; ++it) {
    const LassoSolution f = fit_lasso(center_dataset(x, y), 0.5, {1e-13});
    y(1) = f.fitted(1);
  }
  const Dataset d = center_dataset(x, y);
  const LassoSolution full = fit_lasso(d, 0.5, {1e-13});
  ASSERT_LT(std::abs(d.y()(1) - full.fitted(1)), 1e-12);
  const WeightPath path = compute_path(d, 0.5, 1, full);
  EXPECT_EQ(path.segments.size(), 1u);
  EXPECT_LT((path.loo_solution.beta - full.beta).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ComputePath, MatchesOracleAtInteriorWeights) {
  const Dataset d = random_dataset(25, 10, 8);
  const double lambda = 0.8;
  const LassoSolution full = fit_lasso(d, lambda, {1e-11});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, lambda, k, full, {true});
    validate(path, d.n());
    for (double w : {0.75, 0.5, 0.25, 0.0}) {
      const auto est = interpolate(path, w);
      const LassoSolution ref = oracle::weighted_lasso_refit(d, lambda, k, w);
      EXPECT_LT((est.beta - ref.beta).cwiseAbs().maxCoeff(), 1e-6) << "k=" << k << " w=" << w;
      EXPECT_NEAR(est.beta0, ref.beta0, 1e-6);
    }
  }
}

TEST(ComputePath, EndpointMatchesDeletedFit) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index n = seed % 2 == 0 ? 20 : 12;
    const Index p = seed % 2 == 0 ? 8 : 30;
    const Dataset d = random_dataset(n, p, 100 + seed);
    const double lambda = lambda_fraction(d, seed % 3 == 0 ? 0.1 : 0.35);
    const LassoSolution full = fit_lasso(d, lambda, {1e-11});
    const Index k = static_cast<Index>(seed % static_cast<std::uint64_t>(n));
    const WeightPath path = compute_path(d, lambda, k, full);
    const Subset sub = drop_row(d, k);
    const LassoSolution del = fit_lasso(sub.data, lambda, {1e-11});
    const auto est = interpolate(path, 0.0);
    EXPECT_LT((est.beta - del.beta).cwiseAbs().maxCoeff(), 1e-6) << "seed " << seed;
    EXPECT_NEAR(est.beta0, del.beta0 - sub.shift.dot(del.beta), 1e-6);
    EXPECT_LE(path.loo_solution.kkt_violation, 1e-6 * std::max(1.0, lambda));
  }
}

TEST(ComputePath, SegmentInteriorOptimality) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Dataset d = random_dataset(20, 30, 10);
  const double lambda = lambda_fraction(d, 0.15);
  const LassoSolution full = fit_lasso(d, lambda, {1e-11});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, lambda, k, full);
    for (const auto& seg : path.segments) {
      for (int i = 0; i < 5; ++i) {
        const double w = seg.omega_lo + (seg.omega_hi - seg.omega_lo) * u(rng);
        const auto est = interpolate(path, w);
        EXPECT_LE(weighted_kkt_violation(d, lambda, k, w, est.beta0, est.beta), 1e-6);
      }
    }
  }
}

TEST(ComputePath, OneEventPerBreakpoint) {
  const Dataset d = random_dataset(20, 40, 11);
  const double lambda = lambda_fraction(d, 0.1);
  const LassoSolution full = fit_lasso(d, lambda, {1e-11});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, lambda, k, full);
    for (std::size_t m = 0; m + 1 < path.segments.size(); ++m) {
      const auto a = path.segments[m].active_set.size();
      const auto b = path.segments[m + 1].active_set.size();
      EXPECT_EQ(a > b ? a - b : b - a, 1u);
      EXPECT_NE(path.segments[m].event.kind, EventKind::kTerminal);
    }
    EXPECT_EQ(path.segments.back().event.kind, EventKind::kTerminal);
  }
}

TEST(ResidualAt, MatchesInterpolatedFit) {
  const Dataset d = random_dataset(20, 8, 12);
  const double lambda = lambda_fraction(d, 0.2);
  const LassoSolution full = fit_lasso(d, lambda, {1e-12});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, lambda, k, full);
    EXPECT_NEAR(residual_at(path, 1.0), d.y()(k) - full.fitted(k), 1e-9);
    for (double w : {0.9, 0.4, 0.1, 0.0}) {
      const auto est = interpolate(path, w);
      const double direct = d.y()(k) - (est.beta0 + d.x().row(k).dot(est.beta));
      EXPECT_NEAR(residual_at(path, w), direct, 1e-10 * std::max(1.0, std::abs(direct)));
      const Vector fit = fitted_at(path, w);
      const Vector assembled = (d.x() * est.beta).array() + est.beta0;
      EXPECT_LT((fit - assembled).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, fit.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(ResidualAt, NoChangeGivesClassicInflation) {
  const Dataset d = random_dataset(30, 4, 13);
  const double lambda = lambda_fraction(d, 0.05);
  const LassoSolution full = fit_lasso(d, lambda, {1e-12});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, lambda, k, full);
    if (path.update_count() != 0) continue;
    const double h = hat_quantities(d, full.active_set, k).h_kk;
    EXPECT_NEAR(residual_at(path, 0.0), (d.y()(k) - full.fitted(k)) / (1.0 - h), 1e-9);
  }
}

TEST(Interpolate, ExactAtBreakpoints) {
  const Dataset d = random_dataset(20, 30, 14);
  const double lambda = lambda_fraction(d, 0.1);
  const LassoSolution full = fit_lasso(d, lambda, {1e-11});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, lambda, k, full);
    EXPECT_EQ(interpolate(path, 1.0).beta, full.beta);
    for (const auto& seg : path.segments) {
      EXPECT_EQ(interpolate(path, seg.omega_lo).beta, seg.omega_lo == 0.0 ? path.segments.back().beta_at_lo
                                                                           : seg.beta_at_lo);
    }
    EXPECT_THROW(interpolate(path, 1.5), InputError);
  }
}

TEST(ComputePath, WideDesignStaysBelowSaturation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset d = random_dataset(10, 25, 200 + seed, 5, 0.3);
    const LambdaPath lp = lambda_path(d);
    const double lambda = std::max(lp.knots.back().lambda, 1e-3) * 1.5;
    const LassoSolution full = solution_at(d, lp, lambda);
    for (Index k = 0; k < d.n(); ++k) {
      const WeightPath path = compute_path(d, lambda, k, full);
      for (const auto& seg : path.segments) EXPECT_LE(static_cast<Index>(seg.active_set.size()), d.n() - 1);
      EXPECT_LE(path.loo_solution.active_size(), d.n() - 2);
    }
  }
}

TEST(ComputePath, DroppedVariableReentersWithOppositeSign) {
  const Dataset d = random_dataset(25, 10, 1028, 5);
  const LambdaPath lp = lambda_path(d);
  const double lambda = std::max(0.05 * lp.lambda_max, 1.5 * lp.min_lambda());
  const LassoSolution full = solution_at(d, lp, lambda, 1e-11);
  const WeightPath path = compute_path(d, lambda, 3, full);
  ASSERT_GE(path.segments.size(), 3u);
  const auto& first = path.segments[0].event;
  const auto& second = path.segments[1].event;
  EXPECT_EQ(first.kind, EventKind::kDrop);
  EXPECT_EQ(second.variable, first.variable);
  EXPECT_EQ(second.kind, full.beta(first.variable) < 0.0 ? EventKind::kAddPositive : EventKind::kAddNegative);
  for (double w : {0.05, 0.01, 0.0}) {
    const auto est = interpolate(path, w);
    const LassoSolution ref = oracle::weighted_lasso_refit(d, lambda, 3, w);
    EXPECT_LE((est.beta - ref.beta).cwiseAbs().maxCoeff(), 1e-8) << "omega " << w;
  }
}

TEST(ComputePath, ZeroLambdaHasNoEvents) {
  const Dataset d = random_dataset(30, 6, 1);
  const LassoSolution full = fit_lasso(d, 0.0, {1e-12});
  for (Index k = 0; k < d.n(); ++k) {
    const WeightPath path = compute_path(d, 0.0, k, full);
    EXPECT_EQ(path.update_count(), 0u) << "case " << k;
    const LassoSolution ref = oracle::weighted_lasso_refit(d, 0.0, k, 0.0);
    EXPECT_LE((path.loo_solution.beta - ref.beta).cwiseAbs().maxCoeff(), 1e-8);
  }
}
