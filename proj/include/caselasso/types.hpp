#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "caselasso/dataset.hpp"

namespace caselasso {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Lasso fit at a fixed penalty.
///
/// `signs` holds sign(beta_j) on the active set and the subgradient value
/// -d_j / lambda on the inactive set, so it is the full subgradient vector of
/// the optimality conditions.
struct LassoSolution {
  double lambda = 0.0;
  double beta0 = 0.0;
  Vector beta;
  std::vector<Index> active_set;  // ascending
  Vector signs;
  Vector fitted;
  double kkt_violation = 0.0;

  Index active_size() const noexcept { return static_cast<Index>(active_set.size()); }
  double l1_norm() const { return beta.lpNorm<1>(); }
};

enum class EventKind : std::uint8_t { kDrop, kAddPositive, kAddNegative, kTerminal };

/// What happens at the low-weight end of a segment.
struct PathEvent {
  EventKind kind = EventKind::kTerminal;
  Index variable = -1;
};

inline std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kDrop: return "drop";
    case EventKind::kAddPositive: return "add+";
    case EventKind::kAddNegative: return "add-";
    case EventKind::kTerminal: return "terminal";
  }
  return "unknown";
}

/// One linear piece of the case-weight path. Over (omega_lo, omega_hi] the
/// active set and signs are fixed and every quantity is affine in
/// xi = (1 - omega) / (1 - (1 - omega) h_kk).
struct WeightPathSegment {
  double omega_hi = 1.0;
  double omega_lo = 0.0;
  double xi_start = 0.0;
  double xi_end = 0.0;
  double h_kk = 0.0;
  /// y_k minus the fitted value of the regular-Lasso counterpart for this
  /// segment's (active set, signs).
  double residual = 0.0;
  std::vector<Index> active_set;  // ascending
  Vector signs;                   // length p, zero off the active set
  Vector beta_at_hi, beta_at_lo;
  double beta0_at_hi = 0.0, beta0_at_lo = 0.0;
  Vector fitted_at_hi, fitted_at_lo;
  PathEvent event;
};

/// Case-weight homotopy for case `case_index` at fixed lambda, from
/// omega = 1 (full data) to omega = 0 (case deleted).
struct WeightPath {
  Index case_index = 0;
  double lambda = 0.0;
  std::vector<WeightPathSegment> segments;
  std::vector<double> breakpoints;  // omega_0 = 1 > ... > omega_M = 0
  LassoSolution loo_solution;
  Vector full_fitted;  // fitted values of the full-data fit (omega = 1)

  std::size_t update_count() const noexcept {
    return segments.empty() ? 0 : segments.size() - 1;
  }
};

struct InfluenceRecord {
  Index case_index = 0;
  double cooks_exact = 0.0;
  double cooks_approx = 0.0;
  double local_influence = 0.0;
  double leverage = 0.0;
  double studentized_residual = 0.0;
  std::size_t path_updates = 0;
  double threshold = 0.0;
  bool flagged = false;
};

enum class VarianceMode : std::uint8_t { kOls, kLassoDf };
enum class ThresholdMode : std::uint8_t { kPooled, kExternallyNormalized };

inline std::string to_string(VarianceMode m) { return m == VarianceMode::kOls ? "ols" : "lasso_df"; }
inline std::string to_string(ThresholdMode m) {
  return m == ThresholdMode::kPooled ? "pooled" : "externally_normalized";
}

struct InfluenceGraph {
  std::vector<double> fractions;
  std::vector<double> lambdas;
  Matrix distances;  // fractions x n
  std::vector<double> thresholds;
  std::vector<double> d_bar;
  double s2 = 0.0;
};

struct DetectionReport {
  double lambda_hat = 0.0;
  double fraction_hat = 0.0;
  double s2 = 0.0;
  VarianceMode s2_mode = VarianceMode::kOls;
  ThresholdMode variance_mode = ThresholdMode::kPooled;
  double threshold = 0.0;  // pooled threshold; per-case values live in records
  std::vector<InfluenceRecord> records;
  std::uint64_t seed = 0;
  int folds = 10;

  std::vector<Index> flagged() const {
    std::vector<Index> out;
    for (const auto& r : records)
      if (r.flagged) out.push_back(r.case_index);
    return out;
  }
};

namespace detail {

inline std::vector<Index> support(const Vector& beta) {
  std::vector<Index> out;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) out.push_back(j);
  return out;
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

/// Asserts the structural LassoSolution invariants (support and signs agree,
/// subgradient bounded). Throws NumericalError with a description.
inline void validate(const LassoSolution& s, double tol = 1e-8) {
  if (s.lambda < 0.0) throw NumericalError("negative lambda");
  if (detail::support(s.beta) != s.active_set) throw NumericalError("active set does not match support");
  for (Index j : s.active_set)
    if (detail::sign(s.beta(j)) != s.signs(j)) throw NumericalError("sign vector disagrees with beta");
  for (Index j = 0; j < s.signs.size(); ++j)
    if (std::abs(s.signs(j)) > 1.0 + tol) throw NumericalError("subgradient outside [-1, 1]");
  if (s.kkt_violation > tol) throw NumericalError("kkt violation above tolerance");
}

inline void validate(const WeightPath& path, Index n, double tol = 1e-9) {
  if (path.segments.empty()) throw NumericalError("empty weight path");
  if (path.segments.front().omega_hi != 1.0) throw NumericalError("path does not start at omega = 1");
  if (path.segments.back().omega_lo != 0.0) throw NumericalError("path does not end at omega = 0");
  const double min_h = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < path.segments.size(); ++m) {
    const auto& s = path.segments[m];
    if (s.h_kk < min_h - tol || s.h_kk > 1.0 + tol) throw NumericalError("leverage outside [1/n, 1]");
    if (s.omega_lo > s.omega_hi) throw NumericalError("segment weights out of order");
    if (s.residual != 0.0 && !(s.xi_end > s.xi_start)) throw NumericalError("xi not increasing on segment");
    if (m + 1 < path.segments.size()) {
      const auto& t = path.segments[m + 1];
      const double scale = 1.0 + s.beta_at_lo.cwiseAbs().maxCoeff();
      if ((s.beta_at_lo - t.beta_at_hi).cwiseAbs().maxCoeff() > 1e-6 * scale)
        throw NumericalError("path discontinuous at breakpoint");
    }
  }
}

}  // namespace caselasso
