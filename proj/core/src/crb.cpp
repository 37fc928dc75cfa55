#include "qdesign/crb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "qdesign/errors.hpp"
#include "qdesign/golden.hpp"
#include "qdesign/parallel.hpp"

namespace qdesign {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void require_density(const NoiseDensity& d, const char* what) {
  if (!d.has_density()) {
    throw Error(ErrorKind::kNoDensity, fmt::format("{} needs a density", what));
  }
}

std::vector<double> with_points(std::vector<double> bps, std::initializer_list<double> extra) {
  bps.insert(bps.end(), extra.begin(), extra.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

// Integration window [-1, 0] intersected with the region where xi(theta, .)
// is not negligible.
std::pair<double, double> xi_window(const NoiseDensity& d, double theta) {
  const double r = d.tail_radius();
  const double t = std::abs(theta);
  return {std::max(-1.0, -t - r), std::min(0.0, t + r)};
}

bool saturated(double g) { return !(g > kDegenerateEps && g < 1.0 - kDegenerateEps); }

}  // namespace

double g_direct(const Quantizer& q, const NoiseDensity& d, double theta) {
  if (!d.has_density()) return q.evaluate(theta);
  const double lo = q.lower();
  const double hi = q.upper();
  const double r = d.tail_radius();
  const double a = std::max(lo, theta - r);
  const double b = std::min(hi, theta + r);
  double g = 0.0;
  if (std::isfinite(lo)) g += q.left_value() * d.cdf(lo - theta);
  if (std::isfinite(hi)) g += q.right_value() * d.cdf(theta - hi);
  if (b > a) {
    const auto bps = with_points(q.breakpoints(), {theta});
    g += integrate_piecewise([&](double x) { return q.evaluate(x) * d.pdf(x - theta); }, a, b, bps);
  }
  return g;
}

double g_antisymmetric(const Quantizer& q, const NoiseDensity& d, double theta) {
  if (!q.is_unit_support()) {
    throw Error(ErrorKind::kInvalidParameter, "antisymmetric form needs a unit-support quantizer");
  }
  if (!d.has_density()) return q.evaluate(theta);
  const auto [a, b] = xi_window(d, theta);
  double g = d.cdf(theta);
  if (b > a) {
    const auto bps = with_points(q.breakpoints(), {theta, -theta});
    g += integrate_piecewise(
        [&](double x) { return q.evaluate(x) * (d.pdf(x - theta) - d.pdf(x + theta)); }, a, b, bps);
  }
  return g;
}

double g_of_theta(const Quantizer& q, const NoiseDensity& d, double theta) {
  if (!d.has_density()) return q.evaluate(theta);
  if (std::holds_alternative<Quantizer::Threshold>(q.variant())) return d.cdf(theta);
  if (q.is_unit_support()) return g_antisymmetric(q, d, theta);
  return g_direct(q, d, theta);
}

double g_prime_direct(const Quantizer& q, const NoiseDensity& d, double theta) {
  if (!d.has_density()) return q.derivative(theta);
  const double lo = q.lower();
  const double hi = q.upper();
  const double r = d.tail_radius();
  const double a = std::max(lo, theta - r);
  const double b = std::min(hi, theta + r);
  double gp = 0.0;
  if (std::isfinite(lo)) gp -= q.left_value() * d.pdf(lo - theta);
  if (std::isfinite(hi)) gp += q.right_value() * d.pdf(hi - theta);
  if (b > a) {
    const auto bps = with_points(q.breakpoints(), {theta});
    gp -= integrate_piecewise(
        [&](double x) { return q.evaluate(x) * d.pdf_derivative_ae(x - theta); }, a, b, bps);
  }
  return gp;
}

double g_prime_antisymmetric(const Quantizer& q, const NoiseDensity& d, double theta) {
  if (!q.is_unit_support()) {
    throw Error(ErrorKind::kInvalidParameter, "antisymmetric form needs a unit-support quantizer");
  }
  if (!d.has_density()) return q.derivative(theta);
  const auto [a, b] = xi_window(d, theta);
  double gp = d.pdf(theta);
  if (b > a) {
    const auto bps = with_points(q.breakpoints(), {theta, -theta});
    gp -= integrate_piecewise(
        [&](double x) {
          return q.evaluate(x) * (d.pdf_derivative_ae(x - theta) + d.pdf_derivative_ae(x + theta));
        },
        a, b, bps);
  }
  return gp;
}

double g_prime(const Quantizer& q, const NoiseDensity& d, double theta) {
  if (!d.has_density()) return q.derivative(theta);
  if (std::holds_alternative<Quantizer::Threshold>(q.variant())) return d.pdf(theta);
  if (q.is_unit_support()) return g_prime_antisymmetric(q, d, theta);
  return g_prime_direct(q, d, theta);
}

double fisher_information(const Quantizer& q, const NoiseDensity& d, double theta) {
  const double g = g_of_theta(q, d, theta);
  if (saturated(g)) {
    throw Error(ErrorKind::kDegenerateProbability,
                fmt::format("g({}) = {} is saturated; CRB is infinite", theta, g));
  }
  const double gp = g_prime(q, d, theta);
  return gp * gp / (g * (1.0 - g));
}

namespace {

// Without noise, g = gamma and a quantizer that reaches 0 exactly at theta = -1
// (the sine, say) gives CRB = 0/0 there. The parameter range is closed by
// continuity, so use the one-sided limit, extrapolated from interior points.
double noiseless_endpoint_limit(const Quantizer& q, double theta) {
  constexpr int kNodes = 4;
  constexpr double kStep = 1e-2;
  const double inward = theta < 0.0 ? 1.0 : -1.0;
  std::array<double, kNodes> x{}, y{};
  for (int i = 0; i < kNodes; ++i) {
    x[i] = (i + 1) * kStep;
    const double t = theta + inward * x[i];
    const double g = q.evaluate(t);
    const double gp = q.derivative(t);
    if (saturated(g) || !(gp != 0.0) || !std::isfinite(gp)) return kInf;
    y[i] = g * (1.0 - g) / (gp * gp);
  }
  // Neville's scheme evaluated at x = 0.
  for (int k = 1; k < kNodes; ++k) {
    for (int i = kNodes - 1; i >= k; --i) {
      y[i] = (x[i] * y[i - 1] - x[i - k] * y[i]) / (x[i] - x[i - k]);
    }
  }
  return y[kNodes - 1] > 0.0 ? y[kNodes - 1] : kInf;
}

double crb_from(const Quantizer& q, const NoiseDensity& d, double theta, double g, double gp) {
  if (!saturated(g)) return g * (1.0 - g) / (gp * gp);
  if (!d.has_density() && std::abs(theta) == 1.0) return noiseless_endpoint_limit(q, theta);
  return kInf;
}

}  // namespace

double crb(const Quantizer& q, const NoiseDensity& d, double theta) {
  const double g = g_of_theta(q, d, theta);
  if (saturated(g) && d.has_density()) return kInf;
  return crb_from(q, d, theta, g, saturated(g) ? 0.0 : g_prime(q, d, theta));
}

CrbProfile max_crb(const Quantizer& q, const NoiseDensity& d, int L) {
  if (L < 10) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("parameter grid needs L >= 10, got {}", L));
  }
  CrbProfile p;
  p.L = L;
  const auto n = static_cast<std::size_t>(L) + 1;
  p.thetas.resize(n);
  p.g_values.resize(n);
  p.g_prime_values.resize(n);
  p.crb_values.resize(n);
  parallel_for(n, [&](std::size_t l) {
    const double theta = static_cast<double>(-static_cast<long>(l)) / L;
    const double g = g_of_theta(q, d, theta);
    const double gp = g_prime(q, d, theta);
    p.thetas[l] = theta;
    p.g_values[l] = g;
    p.g_prime_values[l] = gp;
    p.crb_values[l] = crb_from(q, d, theta, g, gp);
  });
  if (std::all_of(p.crb_values.begin(), p.crb_values.end(), [](double c) { return std::isinf(c); })) {
    throw Error(ErrorKind::kDegenerateProbability,
                fmt::format("{} quantizer saturates at every grid point", q.name()));
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l < n; ++l) {
    if (p.crb_values[l] > p.crb_values[best]) best = l;
  }
  p.phi = p.crb_values[best];
  p.argmax_theta = p.thetas[best];
  return p;
}

bool is_admissible(const Quantizer& q, const NoiseDensity& d, int L) {
  if (L < 1) throw Error(ErrorKind::kInvalidParameter, "L must be positive");
  const auto n = 2 * static_cast<std::size_t>(L) + 1;
  std::vector<double> g(n);
  parallel_for(n, [&](std::size_t i) {
    g[i] = g_of_theta(q, d, -1.0 + static_cast<double>(i) / L);
  });
  for (std::size_t i = 1; i < n; ++i) {
    if (g[i] < g[i - 1] - 1e-10) return false;
  }
  return g.back() > g.front();
}

DominanceCheck check_dominance(const Quantizer& q1, const Quantizer& q2, const NoiseDensity& d,
                               int L) {
  if (L < 1) throw Error(ErrorKind::kInvalidParameter, "L must be positive");
  const auto n = static_cast<std::size_t>(L) + 1;
  std::vector<double> c1(n), c2(n);
  parallel_for(n, [&](std::size_t l) {
    const double theta = static_cast<double>(-static_cast<long>(l)) / L;
    c1[l] = crb(q1, d, theta);
    c2[l] = crb(q2, d, theta);
  });
  DominanceCheck out;
  out.worst_excess = -kInf;
  for (std::size_t l = 0; l < n; ++l) {
    const double excess = (c1[l] == c2[l]) ? 0.0 : c1[l] - c2[l];
    if (excess > out.worst_excess) {
      out.worst_excess = excess;
      out.worst_theta = static_cast<double>(-static_cast<long>(l)) / L;
    }
    if (!(c1[l] <= c2[l] + 1e-9 * std::max(1.0, std::abs(c2[l])))) out.dominates = false;
  }
  return out;
}

bool dominates(const Quantizer& q1, const Quantizer& q2, const NoiseDensity& d, int L) {
  return check_dominance(q1, q2, d, L).dominates;
}

CriticalSigma critical_sigma(double beta) {
  constexpr double kTol = 1e-4;
  constexpr int kGrid = 200;
  const auto shape = NoiseDensity::generalized_gaussian(beta, 1.0);
  const auto threshold = Quantizer::threshold();
  auto phi = [&](double sigma) {
    try {
      return max_crb(threshold, shape.with_sigma2(sigma * sigma), kGrid).phi;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kDegenerateProbability) return kInf;
      throw;
    }
  };
  const auto r = golden_section_minimize(phi, kCriticalSigmaLower, kCriticalSigmaUpper, kTol);
  if (r.x - kCriticalSigmaLower < 2 * kTol || kCriticalSigmaUpper - r.x < 2 * kTol) {
    throw Error(ErrorKind::kOptimizationFailure,
                fmt::format("critical sigma search hit the interval endpoint (sigma = {})", r.x));
  }
  return {r.x, r.fx};
}

double sine_high_snr_limit(const NoiseDensity& shape) {
  require_density(shape, "sine_high_snr_limit");
  const double b = shape.beta();
  const double g2 = std::tgamma(2.0 / b);
  return 8.0 / (kPi * kPi) * std::tgamma(1.0 / b) * std::tgamma(3.0 / b) / (g2 * g2);
}

double sine_high_snr_limit_from_mean(double mu1) {
  return 4.0 / (kPi * kPi) / (2.0 * mu1 * mu1);
}

int default_crb_grid(double sigma) {
  const double raw = std::ceil(10.0 / sigma);
  return static_cast<int>(std::clamp(raw, 100.0, 2000.0));
}

}  // namespace qdesign
