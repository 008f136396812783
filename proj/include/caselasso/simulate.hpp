#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"
#include "caselasso/influence.hpp"
#include "caselasso/lasso.hpp"
#include "caselasso/parallel.hpp"

namespace caselasso::sim {

/// splitmix64 finalizer; replicate r of master seed s uses mix(s + r).
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) {
  return mix(master + replicate);
}

using Rng = std::mt19937_64;

inline Vector normals(Rng& rng, Index n) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

/// Rows iid N(0, S) with S_ij = base^{|i-j|}, via the AR(1) recursion over
/// columns.
inline Matrix gen_design(Index n, Index p, double base, Rng& rng) {
  if (!(base > 0.0 && base < 1.0)) throw InputError("correlation base must lie in (0, 1)");
  if (n < 1 || p < 1) throw InputError("design needs positive dimensions");
  Matrix x(n, p);
  const double innovation = std::sqrt(1.0 - base * base);
  std::normal_distribution<double> z(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    for (Index j = 1; j < p; ++j) x(i, j) = base * x(i, j - 1) + innovation * z(rng);
  }
  return x;
}

inline Matrix gen_design(Index n, Index p, double base, std::uint64_t seed) {
  Rng rng(seed);
  return gen_design(n, p, base, rng);
}

struct SimConfig {
  Index n = 50;
  Index p = 10;
  double a = 0.0;
  double b = 0.0;
  Index q = 10;  // 1-based column
  std::vector<double> v{1.0, -1.0, 0.5, -0.5};
  int replicates = 200;
  std::uint64_t seed = 1;
  double correlation_base = 0.2;
  int folds = 10;
  ThresholdMode threshold_mode = ThresholdMode::kPooled;
  std::size_t grid_points = 101;

  void validate() const {
    if (n < 3) throw InputError("n must be at least 3");
    if (p < 1) throw InputError("p must be positive");
    if (q < 1 || q > p) throw InputError("q must lie in [1, p]");
    if (replicates < 1) throw InputError("replicates must be positive");
    if (static_cast<Index>(v.size()) > p) throw InputError("signal pattern longer than p");
    if (folds < 2 || folds > n) throw InputError("folds must lie in [2, n]");
  }

  Vector beta() const {
    Vector b = Vector::Zero(p);
    for (std::size_t j = 0; j < v.size(); ++j) b(static_cast<Index>(j)) = v[j];
    return b;
  }
};

/// Sets x_{1q} = a and y_1 = x_1' beta + b (noise-free mean plus shift).
inline void contaminate(Matrix& x, Vector& y, const Vector& beta, double a, double b, Index q) {
  if (q < 1 || q > x.cols()) throw InputError("q must lie in [1, p]");
  x(0, q - 1) = a;
  y(0) = x.row(0).dot(beta) + b;
}

struct Replicate {
  Matrix x;
  Vector y;
};

/// One simulated dataset: correlated design, unit-variance noise, case 1
/// contaminated.
inline Replicate gen_replicate(const SimConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Replicate r;
  r.x = gen_design(cfg.n, cfg.p, cfg.correlation_base, rng);
  const Vector beta = cfg.beta();
  r.y = r.x * beta + normals(rng, cfg.n);
  contaminate(r.x, r.y, beta, cfg.a, cfg.b, cfg.q);
  return r;
}

struct DetectionRates {
  double rate_case1 = 0.0;
  double mean_rate_others = 0.0;
  int completed = 0;
  int failed = 0;
};

inline DetectionRates detection_experiment(const SimConfig& cfg) {
  cfg.validate();
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<int> ok(reps, 0);
  std::vector<int> hit1(reps, 0);
  std::vector<double> others(reps, 0.0);
  parallel_for(reps, [&](std::size_t r) {
    const Replicate rep = gen_replicate(cfg, replicate_seed(cfg.seed, r));
    try {
      const Dataset data = center_dataset(rep.x, rep.y);
      DetectOptions opt;
      opt.folds = cfg.folds;
      opt.seed = replicate_seed(cfg.seed ^ 0x5bd1e995ULL, r);
      opt.threshold_mode = cfg.threshold_mode;
      opt.grid_points = cfg.grid_points;
      const DetectionReport report = detect(data, opt);
      hit1[r] = report.records[0].flagged ? 1 : 0;
      int count = 0;
      for (std::size_t i = 1; i < report.records.size(); ++i) count += report.records[i].flagged ? 1 : 0;
      others[r] = static_cast<double>(count) / static_cast<double>(report.records.size() - 1);
      ok[r] = 1;
    } catch (const NumericalError&) {
      ok[r] = 0;
    }
  });
  DetectionRates out;
  double s1 = 0.0, so = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!ok[r]) {
      ++out.failed;
      continue;
    }
    ++out.completed;
    s1 += hit1[r];
    so += others[r];
  }
  if (out.completed > 0) {
    out.rate_case1 = s1 / out.completed;
    out.mean_rate_others = so / out.completed;
  }
  return out;
}

enum class Scenario { kI, kII, kIII, kIV, kPairs };

inline Scenario parse_scenario(const std::string& s) {
  if (s == "I" || s == "1") return Scenario::kI;
  if (s == "II" || s == "2") return Scenario::kII;
  if (s == "III" || s == "3") return Scenario::kIII;
  if (s == "IV" || s == "4") return Scenario::kIV;
  if (s == "pairs") return Scenario::kPairs;
  throw InputError("unknown scenario '" + s + "'");
}

struct RawData {
  Matrix x;
  Vector y;
};

/// Toy mechanism data: n = 10, p = 2, beta = (4, 1). The first n - 1 designs
/// are centered so that x_n = (0, 0) stays at the origin after centering.
inline RawData scenario_data(Scenario id, std::uint64_t seed) {
  if (id == Scenario::kPairs) throw InputError("use pairs_data for the correlated-pairs design");
  constexpr Index n = 10;
  Rng rng(seed);
  Matrix base(n - 1, 2);
  {
    std::normal_distribution<double> z(0.0, 1.0);
    for (Index i = 0; i < n - 1; ++i)
      for (Index j = 0; j < 2; ++j) base(i, j) = z(rng);
  }
  base.rowwise() -= base.colwise().mean();
  const Vector beta = (Vector(2) << 4.0, 1.0).finished();
  const Vector y_base = base * beta + normals(rng, n - 1);
  const double y_bar = y_base.mean();

  Vector xn(2);
  double yn = 0.0;
  switch (id) {
    case Scenario::kI:
      xn << 0.0, 0.0;
      yn = y_bar + 3.0;
      break;
    case Scenario::kII:
      xn << 0.0, 4.0;
      yn = y_bar;
      break;
    case Scenario::kIII: {
      xn << 0.0, 4.0;
      // on the OLS plane of the other cases: zero OLS residual once added
      Matrix z(n - 1, 3);
      z.col(0).setOnes();
      z.rightCols(2) = base;
      const Vector coef = z.colPivHouseholderQr().solve(y_base);
      yn = coef(0) + xn.dot(coef.tail(2));
      break;
    }
    case Scenario::kIV:
      xn << 4.0, 0.0;
      yn = -4.0;
      break;
    case Scenario::kPairs:
      break;
  }
  RawData out;
  out.x.resize(n, 2);
  out.x.topRows(n - 1) = base;
  out.x.row(n - 1) = xn.transpose();
  out.y.resize(n);
  out.y.head(n - 1) = y_base;
  out.y(n - 1) = yn;
  return out;
}

/// Three independent pairs of N(0, 1) features with within-pair correlation
/// r, beta = (c, 0, c, 0, c, 0), unit noise.
inline RawData pairs_data(Index n, std::uint64_t seed, double r = 0.5, double coef = 1.0) {
  if (!(r > -1.0 && r < 1.0)) throw InputError("pair correlation must lie in (-1, 1)");
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  RawData out;
  out.x.resize(n, 6);
  const double w = std::sqrt(1.0 - r * r);
  for (Index i = 0; i < n; ++i) {
    for (Index pair = 0; pair < 3; ++pair) {
      const double u = z(rng);
      out.x(i, 2 * pair) = u;
      out.x(i, 2 * pair + 1) = r * u + w * z(rng);
    }
  }
  Vector beta = Vector::Zero(6);
  beta(0) = beta(2) = beta(4) = coef;
  out.y = out.x * beta + normals(rng, n);
  return out;
}

inline Dataset scenario_generator(Scenario id, std::uint64_t seed, Index pairs_n = 100) {
  const RawData raw = id == Scenario::kPairs ? pairs_data(pairs_n, seed) : scenario_data(id, seed);
  return center_dataset(raw.x, raw.y);
}

}  // namespace caselasso::sim
