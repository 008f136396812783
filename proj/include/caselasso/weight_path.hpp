#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/gram.hpp"
#include "caselasso/lasso.hpp"
#include "caselasso/parallel.hpp"
#include "caselasso/types.hpp"

namespace caselasso {

/// xi = (1 - omega) / (1 - (1 - omega) h). Infinite at (omega = 0, h = 1).
inline double xi_of_omega(double omega, double h_kk) {
  if (!(h_kk >= 0.0 && h_kk <= 1.0 + 1e-12)) throw InputError("leverage outside [0, 1]");
  if (!(omega >= 0.0 && omega <= 1.0)) throw InputError("omega must lie in [0, 1]");
  const double h = std::min(h_kk, 1.0);
  const double denom = 1.0 - (1.0 - omega) * h;
  if (denom <= 0.0) return kInf;
  return (1.0 - omega) / denom;
}

/// Inverse of xi_of_omega, clamped to [0, 1].
inline double omega_of_xi(double xi, double h_kk) {
  if (!(xi >= 0.0)) throw InputError("xi must be nonnegative");
  if (std::isinf(xi)) return 0.0;
  const double h = std::min(h_kk, 1.0);
  const double omega = (1.0 - xi * (1.0 - h)) / (1.0 + xi * h);
  return std::clamp(omega, 0.0, 1.0);
}

/// Largest xi reachable on a segment with leverage h: xi(omega = 0).
inline double terminal_xi(double h_kk) { return h_kk >= 1.0 ? kInf : 1.0 / (1.0 - h_kk); }

/// Regular-Lasso counterpart of one (active set, signs) state, plus the
/// directions along which the omega-weighted solution moves in xi:
///   beta_A(xi) = beta_hat_A - xi * g * r,   d_j(xi) = d_hat_j - xi * v_j * r,
///   fitted(xi) = fitted_hat - xi * h_col * r,   r = y_k - fitted_hat_k.
struct SegmentBasis {
  Index case_index = 0;
  std::vector<Index> order;  // active columns in Gram order
  Vector signs;              // length p
  Vector beta_hat;           // length p
  Vector d_hat;              // length p, -X'(y - fitted_hat)
  Vector fitted_hat;         // length n
  double residual = 0.0;
  double h_kk = 0.0;
  Vector h_col;  // length n
  Vector g;      // (X_A'X_A)^{-1} x_kA, Gram order
  Vector v;      // X'h_col - x_k, length p (zero on A by construction)
  bool saturated = false;

  Vector beta(double xi) const {
    Vector b = beta_hat;
    if (residual != 0.0 && xi != 0.0)
      for (std::size_t c = 0; c < order.size(); ++c)
        b(order[c]) -= xi * g(static_cast<Index>(c)) * residual;
    return b;
  }
  double beta0(double y_mean, Index n, double xi) const {
    return y_mean - xi * residual / static_cast<double>(n);
  }
  Vector fitted(double xi) const { return fitted_hat - (xi * residual) * h_col; }
};

/// Builds the counterpart quantities for the state held in `gram` and `signs`.
/// `xty` is X'(y - ybar).
inline SegmentBasis make_basis(const Dataset& data, const GramState& gram, const Vector& signs, Index k,
                               double lambda, const Vector& xty) {
  const Index n = data.n();
  const Index p = data.p();
  SegmentBasis b;
  b.case_index = k;
  b.order = gram.active();
  b.signs = signs;
  b.beta_hat = Vector::Zero(p);
  b.fitted_hat = Vector::Constant(n, data.y_mean());
  b.h_col = Vector::Constant(n, 1.0 / static_cast<double>(n));
  b.saturated = gram.size() + 1 >= n;
  if (!b.order.empty()) {
    const Matrix xa = gather_columns(data.x(), b.order);
    const Vector ba = gram.inverse() * (gather(xty, b.order) - lambda * gather(signs, b.order));
    for (std::size_t c = 0; c < b.order.size(); ++c) b.beta_hat(b.order[c]) = ba(static_cast<Index>(c));
    b.fitted_hat.noalias() += xa * ba;
    b.g = gram.solve_row(data, k);
    b.h_col.noalias() += xa * b.g;
  } else {
    b.g = Vector();
  }
  b.h_kk = b.h_col(k);
  if (b.saturated) {
    // (1, X_A) spans R^n: H = I.
    b.h_kk = 1.0;
    b.h_col = Vector::Zero(n);
    b.h_col(k) = 1.0;
  }
  if (b.h_kk < 1.0 / static_cast<double>(n) - 1e-9 || b.h_kk > 1.0 + 1e-9)
    throw NumericalError("leverage of case " + std::to_string(k) + " outside [1/n, 1]");
  b.h_kk = std::clamp(b.h_kk, 1.0 / static_cast<double>(n), 1.0);
  b.residual = data.y()(k) - b.fitted_hat(k);
  b.d_hat = -(data.x().transpose() * (data.y() - b.fitted_hat));
  if (b.saturated) {
    b.v = Vector::Zero(p);
  } else {
    b.v = data.x().transpose() * b.h_col - data.x().row(k).transpose();
    for (Index j : b.order) b.v(j) = 0.0;
  }
  return b;
}

/// Full-data state shared by the n paths at one lambda: the counterpart fit
/// of the starting (A, s) and the cross products X'X_A.
struct PathContext {
  double lambda = 0.0;
  GramState gram;
  Vector signs;
  Vector xty;
  Matrix xa;     // X_A, Gram order
  Matrix cross;  // X'X_A
  Vector beta_hat, fitted_hat, d_hat;
};

inline PathContext make_context(const Dataset& data, double lambda, const LassoSolution& full) {
  PathContext c;
  c.lambda = lambda;
  c.gram = GramState::build(data, detail::support(full.beta));
  c.signs = Vector::Zero(data.p());
  for (Index j : c.gram.active()) c.signs(j) = detail::sign(full.beta(j));
  c.xty = data.x().transpose() * (data.y().array() - data.y_mean()).matrix();
  c.xa = gather_columns(data.x(), c.gram.active());
  c.cross = data.x().transpose() * c.xa;
  const SegmentBasis b = make_basis(data, c.gram, c.signs, 0, lambda, c.xty);
  c.beta_hat = b.beta_hat;
  c.fitted_hat = b.fitted_hat;
  c.d_hat = b.d_hat;
  return c;
}

/// make_basis for the context's starting state, reusing the shared pieces:
/// v = X'X_A g - x_k since X'1 = 0.
inline SegmentBasis start_basis(const Dataset& data, const PathContext& c, Index k) {
  const Index n = data.n();
  SegmentBasis b;
  b.case_index = k;
  b.order = c.gram.active();
  b.signs = c.signs;
  b.beta_hat = c.beta_hat;
  b.fitted_hat = c.fitted_hat;
  b.d_hat = c.d_hat;
  b.saturated = c.gram.size() + 1 >= n;
  b.h_col = Vector::Constant(n, 1.0 / static_cast<double>(n));
  if (!b.order.empty()) {
    b.g = c.gram.solve_row(data, k);
    b.h_col.noalias() += c.xa * b.g;
  }
  b.h_kk = b.h_col(k);
  if (b.saturated) {
    b.h_kk = 1.0;
    b.h_col = Vector::Zero(n);
    b.h_col(k) = 1.0;
  }
  if (b.h_kk < 1.0 / static_cast<double>(n) - 1e-9 || b.h_kk > 1.0 + 1e-9)
    throw NumericalError("leverage of case " + std::to_string(k) + " outside [1/n, 1]");
  b.h_kk = std::clamp(b.h_kk, 1.0 / static_cast<double>(n), 1.0);
  b.residual = data.y()(k) - b.fitted_hat(k);
  if (b.saturated || b.order.empty()) {
    b.v = b.saturated ? Vector::Zero(data.p()) : Vector(-data.x().row(k).transpose());
  } else {
    b.v = c.cross * b.g - data.x().row(k).transpose();
    for (Index j : b.order) b.v(j) = 0.0;
  }
  return b;
}

enum class CandidateSource : std::uint8_t { kBetaZero, kHitsPlusLambda, kHitsMinusLambda };

struct CandidateTag {
  CandidateSource source = CandidateSource::kBetaZero;
  Index variable = -1;
};

/// Stacked candidate system: one entry per active variable (ascending
/// column), then the +lambda block and the -lambda block over inactive
/// columns (ascending). Entries without a positive crossing are +inf.
struct XiCandidates {
  Vector values;
  std::vector<CandidateTag> sources;
};

inline XiCandidates xi_candidates(const Dataset& data, const SegmentBasis& basis, double lambda) {
  const Index p = data.p();
  const double r = basis.residual;
  // active rows in column order, then inactive columns for each boundary
  std::vector<Index> position(static_cast<std::size_t>(p), -1);
  for (std::size_t c = 0; c < basis.order.size(); ++c)
    position[static_cast<std::size_t>(basis.order[c])] = static_cast<Index>(c);
  const auto active_count = static_cast<Index>(basis.order.size());

  XiCandidates out;
  const Index total = active_count + 2 * (p - active_count);
  out.values = Vector::Constant(total, kInf);
  out.sources.resize(static_cast<std::size_t>(total));
  auto keep_positive = [](double xi) { return xi > 0.0 && std::isfinite(xi) ? xi : kInf; };

  Index row = 0;
  for (Index j = 0; j < p; ++j) {
    const Index c = position[static_cast<std::size_t>(j)];
    if (c < 0) continue;
    out.sources[static_cast<std::size_t>(row)] = {CandidateSource::kBetaZero, j};
    const double slope = basis.g(c) * r;
    // at lambda = 0 a coefficient passes through zero without leaving
    if (r != 0.0 && slope != 0.0 && lambda > 0.0) out.values(row) = keep_positive(basis.beta_hat(j) / slope);
    ++row;
  }
  const Index plus_row = row;
  const Index minus_row = row + (p - active_count);
  Index slot = 0;
  for (Index j = 0; j < p; ++j) {
    if (position[static_cast<std::size_t>(j)] >= 0) continue;
    out.sources[static_cast<std::size_t>(plus_row + slot)] = {CandidateSource::kHitsPlusLambda, j};
    out.sources[static_cast<std::size_t>(minus_row + slot)] = {CandidateSource::kHitsMinusLambda, j};
    const double slope = basis.v(j) * r;
    if (r != 0.0 && slope != 0.0 && !basis.saturated) {
      out.values(plus_row + slot) = keep_positive((basis.d_hat(j) - lambda) / slope);
      out.values(minus_row + slot) = keep_positive((basis.d_hat(j) + lambda) / slope);
    }
    ++slot;
  }
  return out;
}

/// Max KKT residual of the problem with case k weighted by omega.
inline double weighted_kkt_violation(const Dataset& data, double lambda, Index k, double omega, double beta0,
                                     const Vector& beta) {
  Vector r = data.y() - data.x() * beta;
  r.array() -= beta0;
  r(k) *= omega;
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

struct PathOptions {
  /// Check the weighted KKT conditions at every breakpoint and the Gram
  /// inverse after every update.
  bool verify = false;
  double verify_tol = 1e-6;
  /// Shared full-data state for this lambda (see make_context).
  const PathContext* context = nullptr;
};

namespace detail {

/// Encodes (A, s) as sorted 2j + [s_j > 0].
inline std::vector<Index> state_key(const std::vector<Index>& order, const Vector& signs) {
  std::vector<Index> key;
  key.reserve(order.size());
  for (Index j : order) key.push_back(2 * j + (signs(j) > 0 ? 1 : 0));
  std::sort(key.begin(), key.end());
  return key;
}

inline std::vector<Index> sorted_copy(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline double admission_gap(double xi) { return std::max(1e-12, 1e-10 * xi); }

}  // namespace detail

/// Case-weight homotopy for case k at fixed lambda, from the full-data fit
/// (omega = 1) to the fit with case k removed (omega = 0).
inline WeightPath compute_path(const Dataset& data, double lambda, Index k, const LassoSolution& full,
                               const PathOptions& options = {}) {
  const Index n = data.n();
  const Index p = data.p();
  if (k < 0 || k >= n) throw InputError("case index out of range");
  if (full.beta.size() != p) throw InputError("full solution has the wrong dimension");
  if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");

  if (options.context != nullptr && options.context->lambda != lambda)
    throw InputError("path context was built for a different lambda");
  const PathContext* ctx = options.context;
  Vector local_xty;
  if (ctx == nullptr) local_xty = data.x().transpose() * (data.y().array() - data.y_mean()).matrix();
  const Vector& xty = ctx != nullptr ? ctx->xty : local_xty;

  GramState gram = ctx != nullptr ? ctx->gram : GramState::build(data, detail::support(full.beta));
  Vector signs = Vector::Zero(p);
  for (Index j : gram.active()) signs(j) = detail::sign(full.beta(j));

  auto apply = [&](CandidateSource src, Index j) {
    if (src == CandidateSource::kBetaZero) {
      gram.drop(j, data);
      signs(j) = 0.0;
      return;
    }
    try {
      gram.add(data, j);
    } catch (const SingularUpdateError& e) {
      throw NumericalError(std::string("case-weight path: ") + e.what());
    }
    // d_j = -lambda s_j at the boundary it reached.
    signs(j) = src == CandidateSource::kHitsPlusLambda ? -1.0 : 1.0;
  };

  // Variables sitting on a boundary at omega = 1 and leaving it immediately.
  SegmentBasis basis = ctx != nullptr ? start_basis(data, *ctx, k) : make_basis(data, gram, signs, k, lambda, xty);
  {
    std::vector<char> touched(static_cast<std::size_t>(p), 0);
    const double beta_scale = std::max(1.0, full.beta.cwiseAbs().maxCoeff());
    for (Index guard = 0; guard <= p; ++guard) {
      if (basis.residual == 0.0) break;
      Index pick = -1;
      CandidateSource pick_src = CandidateSource::kBetaZero;
      for (std::size_t c = 0; c < basis.order.size() && pick < 0; ++c) {
        const Index j = basis.order[c];
        if (touched[static_cast<std::size_t>(j)]) continue;
        const double rate = -basis.g(static_cast<Index>(c)) * basis.residual;
        if (lambda > 0.0 && std::abs(basis.beta_hat(j)) <= 1e-9 * beta_scale && basis.beta_hat(j) * rate <= 0.0 &&
            rate != 0.0)
          pick = j;
      }
      if (pick < 0 && !basis.saturated) {
        for (Index j = 0; j < p; ++j) {
          if (signs(j) != 0.0 || touched[static_cast<std::size_t>(j)]) continue;
          if (!(data.column_sq_norms()(j) > 0.0)) continue;
          const double d = basis.d_hat(j);
          const double rate = -basis.v(j) * basis.residual;
          if (std::abs(d) >= lambda * (1.0 - 1e-9) && d * rate > 0.0) {
            pick = j;
            pick_src = d > 0.0 ? CandidateSource::kHitsPlusLambda : CandidateSource::kHitsMinusLambda;
            break;
          }
        }
      }
      if (pick < 0) break;
      touched[static_cast<std::size_t>(pick)] = 1;
      apply(pick_src, pick);
      basis = make_basis(data, gram, signs, k, lambda, xty);
    }
  }

  WeightPath path;
  path.case_index = k;
  path.lambda = lambda;
  path.full_fitted = full.fitted.size() == n ? full.fitted : basis.fitted(0.0);
  path.breakpoints.push_back(1.0);

  std::map<std::vector<Index>, Index> visits;
  const Index visit_limit = std::max<Index>(p * n, 1);
  double omega = 1.0;
  // the candidate undoing the last event sits at the segment start
  CandidateTag suppressed;
  auto is_suppressed = [&](const CandidateTag& t) {
    return t.variable == suppressed.variable && t.source == suppressed.source;
  };
  for (;;) {
    const double xi_start = xi_of_omega(omega, basis.h_kk);
    const double xi_stop = terminal_xi(basis.h_kk);
    WeightPathSegment seg;
    seg.omega_hi = omega;
    seg.xi_start = xi_start;
    seg.h_kk = basis.h_kk;
    seg.residual = basis.residual;
    seg.active_set = detail::sorted_copy(basis.order);
    seg.signs = signs;
    if (path.segments.empty()) {
      seg.beta_at_hi = full.beta;
      seg.beta0_at_hi = full.beta0;
      seg.fitted_at_hi = path.full_fitted;
    } else {
      // continuity: the breakpoint snapshot is shared with the previous piece
      const auto& prev = path.segments.back();
      seg.beta_at_hi = prev.beta_at_lo;
      seg.beta0_at_hi = prev.beta0_at_lo;
      seg.fitted_at_hi = prev.fitted_at_lo;
    }

    const auto key = detail::state_key(basis.order, signs);
    if (++visits[key] > visit_limit) {
      std::ostringstream os;
      os << "case-weight path cycles for case " << k << " at lambda " << lambda << "; state {";
      for (Index code : key) os << code / 2 << (code % 2 ? '+' : '-') << ' ';
      os << "} omega " << omega;
      throw NumericalError(os.str());
    }

    double best = kInf;
    CandidateTag event_tag;
    if (basis.residual != 0.0) {
      const XiCandidates cands = xi_candidates(data, basis, lambda);
      const double floor = xi_start + detail::admission_gap(xi_start);
      for (Index i = 0; i < cands.values.size(); ++i) {
        const double c = cands.values(i);
        const auto& tag = cands.sources[static_cast<std::size_t>(i)];
        if (is_suppressed(tag)) continue;
        if (!(c > floor) || !std::isfinite(c)) continue;
        if (c < best) best = c;
      }
      if (std::isfinite(best)) {
        // ties within the admission gap: drops first, then lowest column
        const double tie = best + detail::admission_gap(best);
        bool found = false;
        for (Index i = 0; i < cands.values.size(); ++i) {
          const double c = cands.values(i);
          const auto& tag = cands.sources[static_cast<std::size_t>(i)];
          if (is_suppressed(tag) || !(c > floor) || c > tie) continue;
          const bool is_drop = tag.source == CandidateSource::kBetaZero;
          const bool cur_drop = event_tag.source == CandidateSource::kBetaZero;
          if (!found || (is_drop && !cur_drop) || (is_drop == cur_drop && tag.variable < event_tag.variable)) {
            event_tag = tag;
            found = true;
          }
        }
      }
    }

    const bool terminal = !(best < xi_stop);
    if (terminal && basis.residual != 0.0 && std::isinf(xi_stop))
      throw NumericalError("case-weight path diverges for case " + std::to_string(k) +
                           ": saturated fit with no drop event");
    const double xi_end = terminal ? xi_stop : best;
    const double omega_end = terminal ? 0.0 : omega_of_xi(xi_end, basis.h_kk);
    seg.xi_end = basis.residual == 0.0 && terminal ? std::max(xi_start, std::isinf(xi_stop) ? xi_start : xi_stop)
                                                   : xi_end;
    seg.omega_lo = omega_end;
    const double xi_eval = std::isinf(seg.xi_end) ? xi_start : seg.xi_end;
    seg.beta_at_lo = basis.beta(xi_eval);
    seg.beta0_at_lo = basis.beta0(data.y_mean(), n, xi_eval);
    seg.fitted_at_lo = basis.fitted(xi_eval);
    if (terminal) {
      seg.event = {EventKind::kTerminal, -1};
    } else {
      const Index j = event_tag.variable;
      if (event_tag.source == CandidateSource::kBetaZero) {
        seg.event = {EventKind::kDrop, j};
        seg.beta_at_lo(j) = 0.0;
      } else {
        seg.event = {event_tag.source == CandidateSource::kHitsPlusLambda ? EventKind::kAddNegative
                                                                          : EventKind::kAddPositive,
                     j};
      }
    }
    if (options.verify) {
      const double v = weighted_kkt_violation(data, lambda, k, seg.omega_lo, seg.beta0_at_lo, seg.beta_at_lo);
      if (v > options.verify_tol * std::max(1.0, lambda))
        throw NumericalError("weighted KKT check failed at omega " + std::to_string(seg.omega_lo) +
                             " for case " + std::to_string(k));
    }
    path.segments.push_back(std::move(seg));
    path.breakpoints.push_back(omega_end);
    if (terminal) break;

    const Index changed = event_tag.variable;
    if (event_tag.source == CandidateSource::kBetaZero)
      // a dropped variable sits at d_j = -lambda s_j; only the opposite boundary is a real event
      suppressed = {signs(changed) > 0.0 ? CandidateSource::kHitsMinusLambda : CandidateSource::kHitsPlusLambda,
                    changed};
    else
      suppressed = {CandidateSource::kBetaZero, changed};
    apply(event_tag.source, changed);
    if (options.verify && gram.inverse_residual(data) > 1e-8) gram.refactor(data);
    omega = omega_end;
    basis = make_basis(data, gram, signs, k, lambda, xty);
    if (omega == 0.0) {
      // event landed on the endpoint
      break;
    }
  }
  if (path.segments.back().omega_lo != 0.0) throw NumericalError("case-weight path stopped early");

  const auto& last = path.segments.back();
  // weighted gradient at omega = 0, from the final basis
  const double xi_final = xi_of_omega(0.0, basis.h_kk);
  Vector d = basis.d_hat;
  if (std::isfinite(xi_final)) d.noalias() -= (xi_final * basis.residual) * basis.v;
  LassoSolution& loo = path.loo_solution;
  loo.lambda = lambda;
  loo.beta0 = last.beta0_at_lo;
  loo.beta = last.beta_at_lo;
  loo.active_set = detail::support(last.beta_at_lo);
  loo.fitted = last.fitted_at_lo;
  loo.signs = Vector::Zero(p);
  double violation = 0.0;
  for (Index j = 0; j < p; ++j) {
    const double b = last.beta_at_lo(j);
    if (b != 0.0) {
      loo.signs(j) = detail::sign(b);
      violation = std::max(violation, std::abs(d(j) + lambda * loo.signs(j)));
    } else {
      loo.signs(j) = lambda > 0.0 ? -d(j) / lambda : 0.0;
      violation = std::max(violation, std::abs(d(j)) - lambda);
    }
  }
  loo.kkt_violation = options.verify
                          ? weighted_kkt_violation(data, lambda, k, 0.0, last.beta0_at_lo, last.beta_at_lo)
                          : violation;
  return path;
}

namespace detail {

inline const WeightPathSegment& segment_for(const WeightPath& path, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw InputError("omega must lie in [0, 1]");
  for (const auto& s : path.segments)
    if (omega > s.omega_lo && omega <= s.omega_hi) return s;
  return path.segments.back();
}

/// Position of omega within its segment, linear in xi.
inline double segment_fraction(const WeightPathSegment& s, double omega) {
  if (omega == s.omega_hi) return 0.0;
  if (omega == s.omega_lo) return 1.0;
  const double span = s.xi_end - s.xi_start;
  if (!(span > 0.0) || std::isinf(span)) return 0.0;
  return (xi_of_omega(omega, s.h_kk) - s.xi_start) / span;
}

}  // namespace detail

struct WeightedCoefficients {
  double beta0 = 0.0;
  Vector beta;
};

/// Coefficients of the omega-weighted fit; exact snapshots at breakpoints.
inline WeightedCoefficients interpolate(const WeightPath& path, double omega) {
  const auto& s = detail::segment_for(path, omega);
  const double t = detail::segment_fraction(s, omega);
  if (t == 0.0) return {s.beta0_at_hi, s.beta_at_hi};
  if (t == 1.0) return {s.beta0_at_lo, s.beta_at_lo};
  return {s.beta0_at_hi + t * (s.beta0_at_lo - s.beta0_at_hi), s.beta_at_hi + t * (s.beta_at_lo - s.beta_at_hi)};
}

/// Fitted values of the omega-weighted fit at all n cases.
inline Vector fitted_at(const WeightPath& path, double omega) {
  const auto& s = detail::segment_for(path, omega);
  const double t = detail::segment_fraction(s, omega);
  if (t == 0.0) return s.fitted_at_hi;
  if (t == 1.0) return s.fitted_at_lo;
  return s.fitted_at_hi + t * (s.fitted_at_lo - s.fitted_at_hi);
}

/// y_k minus the omega-weighted fitted value: r / (1 - (1 - omega) h_kk) with
/// the segment's entry residual r and leverage.
inline double residual_at(const WeightPath& path, double omega) {
  const auto& s = detail::segment_for(path, omega);
  const double denom = 1.0 - (1.0 - omega) * s.h_kk;
  if (s.residual == 0.0) return 0.0;
  if (denom <= 0.0) return s.residual > 0 ? kInf : -kInf;
  return s.residual / denom;
}

/// Paths for every case at one lambda, sharing the full-data Gram state.
inline std::vector<WeightPath> compute_all_paths(const Dataset& data, double lambda, const LassoSolution& full,
                                                 PathOptions options = {}) {
  const PathContext context = make_context(data, lambda, full);
  options.context = &context;
  std::vector<WeightPath> paths(static_cast<std::size_t>(data.n()));
  parallel_for(paths.size(), [&](std::size_t k) {
    paths[k] = compute_path(data, lambda, static_cast<Index>(k), full, options);
  });
  return paths;
}

}  // namespace caselasso
