#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "qdesign/errors.hpp"

namespace qdesign {

struct GaussLegendreRule {
  static constexpr int kPoints = 15;
  std::array<double, kPoints> nodes{};    // on [-1, 1]
  std::array<double, kPoints> weights{};
};

// 15-point Gauss-Legendre rule, computed once by Newton iteration on P_15.
const GaussLegendreRule& gauss_legendre15();

struct QuadratureOptions {
  double abs_tol = 1e-10;
  // Per-panel tolerance never drops below this, so integrable endpoint
  // singularities such as |x|^0.3 still terminate.
  double tol_floor = 1e-15;
  int max_depth = 48;
};

namespace detail {

template <class F>
double gl_panel(const F& f, double a, double b) {
  const auto& rule = gauss_legendre15();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < GaussLegendreRule::kPoints; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

template <class F>
double adaptive(const F& f, double a, double b, double whole, double tol, int depth,
                const QuadratureOptions& opts) {
  const double m = 0.5 * (a + b);
  const double left = gl_panel(f, a, m);
  const double right = gl_panel(f, m, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= std::max(tol, opts.tol_floor)) return refined;
  if (!std::isfinite(refined)) {
    throw Error(ErrorKind::kNumericalFailure, "non-finite integrand");
  }
  if (depth >= opts.max_depth || m <= a || m >= b) {
    throw Error(ErrorKind::kNumericalFailure,
                "quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return adaptive(f, a, m, left, 0.5 * tol, depth + 1, opts) +
         adaptive(f, m, b, right, 0.5 * tol, depth + 1, opts);
}

}  // namespace detail

// Adaptive composite Gauss-Legendre: each 15-point panel is compared with its
// two halves and bisected until they agree within the (halved) tolerance.
// Throws Error{kNumericalFailure} past max_depth.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (!(b > a)) return 0.0;
  const double whole = detail::gl_panel(f, a, b);
  return detail::adaptive(f, a, b, whole, opts.abs_tol, 0, opts);
}

// Same, split at sorted interior breakpoints (kinks or jumps of the
// integrand). Breakpoints outside (a, b) are ignored; the tolerance is shared
// in proportion to sub-interval length.
template <class F>
double integrate_piecewise(const F& f, double a, double b, std::span<const double> breakpoints,
                           const QuadratureOptions& opts = {}) {
  if (!(b > a)) return 0.0;
  const double width = b - a;
  double total = 0.0;
  double lo = a;
  auto piece = [&](double x0, double x1) {
    QuadratureOptions o = opts;
    o.abs_tol = opts.abs_tol * (x1 - x0) / width;
    total += integrate(f, x0, x1, o);
  };
  for (double bp : breakpoints) {
    if (bp <= lo) continue;
    if (bp >= b) break;
    piece(lo, bp);
    lo = bp;
  }
  piece(lo, b);
  return total;
}

}  // namespace qdesign
