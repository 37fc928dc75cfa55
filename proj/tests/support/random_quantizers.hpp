#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "qdesign/quantizer.hpp"

namespace testing_support {

// Increasing slope vectors: K nonnegative weights scaled to sum K/2.
inline std::vector<double> random_monotone_slopes(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> m(K);
  double s = 0.0;
  for (double& x : m) s += (x = u(rng));
  for (double& x : m) x *= 0.5 * K / s;
  return m;
}

// Feasible but not necessarily monotone: node values anywhere in [0, 1].
inline std::vector<double> random_feasible_slopes(std::mt19937_64& rng, int K) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(K);
  double prev = 0.0;
  for (int k = 0; k < K; ++k) {
    const double node = k + 1 < K ? u(rng) : 0.5;
    m[k] = K * (node - prev);
    prev = node;
  }
  return m;
}

// Increasing node values on [-radius, 0] ending at 1/2, so the quantizer
// reaches past [-1, 1] when radius > 1.
inline qdesign::Quantizer random_wide_quantizer(std::mt19937_64& rng, double radius, int nodes = 40) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(nodes);
  for (double& x : v) x = 0.5 * u(rng);
  std::sort(v.begin(), v.end());
  v.front() = 0.0;
  v.back() = 0.5;
  return qdesign::Quantizer::tabulated(radius, v);
}

}  // namespace testing_support
