#pragma once

#include <functional>

namespace qdesign {

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

// Golden-section search for a minimum of a unimodal f on [a, b], stopping
// once the bracket is narrower than tol. Infinite values are allowed.
GoldenResult golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                     double tol);

}  // namespace qdesign
