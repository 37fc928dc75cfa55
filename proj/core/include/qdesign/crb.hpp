#pragma once

#include <vector>

#include "qdesign/noise.hpp"
#include "qdesign/quadrature.hpp"
#include "qdesign/quantizer.hpp"

namespace qdesign {

// g(theta) outside (eps, 1 - eps) is treated as saturated: infinite CRB.
inline constexpr double kDegenerateEps = 1e-12;

// g(theta) = P(Y = S1 | theta). Dispatches to the closed forms (point mass:
// gamma(theta); threshold: F(theta)), the antisymmetric unit-support form for
// quantizers supported on [-1, 1], and the direct convolution otherwise.
double g_of_theta(const Quantizer& q, const NoiseDensity& d, double theta);

// int gamma(x) f(x - theta) dx over the whole line.
double g_direct(const Quantizer& q, const NoiseDensity& d, double theta);

// F(theta) + int_{-1}^{0} gamma(x) xi(theta, x) dx with
// xi(theta, x) = f(x - theta) - f(x + theta). Unit-support quantizers only.
double g_antisymmetric(const Quantizer& q, const NoiseDensity& d, double theta);

// g'(theta), same dispatch as g_of_theta. Quadrature of gamma times the
// analytic theta-derivative of the shifted density, split at density kinks.
double g_prime(const Quantizer& q, const NoiseDensity& d, double theta);
double g_prime_direct(const Quantizer& q, const NoiseDensity& d, double theta);
double g_prime_antisymmetric(const Quantizer& q, const NoiseDensity& d, double theta);

// I(theta) = g'^2 / (g (1 - g)). Throws Error{kDegenerateProbability} when g
// is saturated.
double fisher_information(const Quantizer& q, const NoiseDensity& d, double theta);

// 1 / I(theta), +inf for saturated g.
double crb(const Quantizer& q, const NoiseDensity& d, double theta);

struct CrbProfile {
  int L = 0;
  std::vector<double> thetas;  // theta_l = -l/L, l = 0..L
  std::vector<double> g_values;
  std::vector<double> g_prime_values;
  std::vector<double> crb_values;
  double phi = 0.0;  // max over crb_values
  double argmax_theta = 0.0;
};

// Maximum CRB over the half grid theta_l = -l/L, endpoint -1 included. By
// antisymmetry the other half mirrors it. Saturated points carry infinite CRB
// and make phi infinite; throws Error{kDegenerateProbability} if every point
// is saturated.
CrbProfile max_crb(const Quantizer& q, const NoiseDensity& d, int L);

// Definition of an admissible quantizer: g non-decreasing (to 1e-10) on the
// full grid -1 + i/L, i = 0..2L, and g(1) > g(-1).
bool is_admissible(const Quantizer& q, const NoiseDensity& d, int L);

struct DominanceCheck {
  bool dominates = true;
  double worst_theta = 0.0;
  double worst_excess = 0.0;  // max of CRB1 - CRB2 over the grid
};

// CRB(theta, q1) <= CRB(theta, q2) at every half-grid point, to a relative
// tolerance of 1e-9.
DominanceCheck check_dominance(const Quantizer& q1, const Quantizer& q2, const NoiseDensity& d,
                               int L);
bool dominates(const Quantizer& q1, const Quantizer& q2, const NoiseDensity& d, int L);

struct CriticalSigma {
  double sigma = 0.0;
  double phi = 0.0;
};

inline constexpr double kCriticalSigmaLower = 0.05;
inline constexpr double kCriticalSigmaUpper = 3.0;

// Noise standard deviation minimizing the threshold quantizer's maximum CRB
// for a generalized Gaussian of shape beta. Golden-section search on
// [0.05, 3] to 1e-4, phi evaluated on L = 200. Throws
// Error{kOptimizationFailure} when the minimizer sits on a search endpoint.
CriticalSigma critical_sigma(double beta);

// lim_{sigma -> 0} CRB(+-1, sine; f) = (8/pi^2) Gamma(1/b) Gamma(3/b) / Gamma(2/b)^2.
double sine_high_snr_limit(const NoiseDensity& shape);

// Same limit from the normalized one-sided mean: (4/pi^2) / (2 mu1^2).
double sine_high_snr_limit_from_mean(double mu1);

// ceil(10/sigma) clamped to [100, 2000].
int default_crb_grid(double sigma);

}  // namespace qdesign
