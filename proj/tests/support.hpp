#pragma once

#include <cstdint>
#include <random>

#include <caselasso/dataset.hpp>

namespace testing_support {

using caselasso::Index;
using caselasso::Matrix;
using caselasso::Vector;

/// Gaussian design with a sparse signal; deterministic in `seed`.
inline caselasso::Dataset random_dataset(Index n, Index p, std::uint64_t seed, Index signal = 3,
                                         double noise = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = z(rng);
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < std::min(signal, p); ++j) beta(j) = (j % 2 == 0 ? 2.0 : -1.5) / (1.0 + 0.5 * j);
  Vector y = x * beta;
  for (Index i = 0; i < n; ++i) y(i) += noise * z(rng) + 1.0;
  return caselasso::center_dataset(x, y);
}

}  // namespace testing_support
