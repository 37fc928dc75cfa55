#include "qdesign/noise.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fmt/format.h>
#include <algorithm>
#include <limits>

#include "qdesign/errors.hpp"

namespace qdesign {
namespace {

// Tail exponent: exp(-41) ~ 1.6e-18.
constexpr double kTailExponent = 41.0;

void require_density(const NoiseDensity& d, const char* what) {
  if (!d.has_density()) {
    throw Error(ErrorKind::kNoDensity, fmt::format("{} needs a density; point mass has none", what));
  }
}

}  // namespace

NoiseDensity NoiseDensity::generalized_gaussian(double beta, double sigma2) {
  // beta < 1 gives a cusp that is no longer unimodal in the strict sense used
  // by the optimality results, so the family is restricted to beta >= 1.
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("shape beta must be >= 1, got {}", beta));
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("variance must be positive, got {}", sigma2));
  }
  NoiseDensity d;
  d.family_ = NoiseFamily::kGeneralizedGaussian;
  d.beta_ = beta;
  d.sigma2_ = sigma2;
  d.sigma_ = std::sqrt(sigma2);
  const double g1 = std::tgamma(1.0 / beta);
  const double g3 = std::tgamma(3.0 / beta);
  d.alpha_ = d.sigma_ * std::sqrt(g1 / g3);
  d.norm_ = beta / (2.0 * d.alpha_ * g1);
  return d;
}

NoiseDensity NoiseDensity::point_mass() { return NoiseDensity(); }

NoiseDensity NoiseDensity::with_sigma2(double sigma2) const {
  require_density(*this, "with_sigma2");
  return generalized_gaussian(beta_, sigma2);
}

double NoiseDensity::pdf(double w) const {
  require_density(*this, "pdf");
  const double u = std::abs(w) / alpha_;
  if (beta_ == 2.0) return norm_ * std::exp(-u * u);
  if (beta_ == 1.0) return norm_ * std::exp(-u);
  return norm_ * std::exp(-std::pow(u, beta_));
}

double NoiseDensity::cdf(double w) const {
  if (!has_density()) return w >= 0.0 ? 1.0 : 0.0;
  // Compute the lower tail of |w| and mirror, so cdf(w) + cdf(-w) == 1 holds
  // exactly in floating point.
  const double u = std::abs(w) / alpha_;
  double tail;
  if (beta_ == 2.0) {
    tail = 0.5 * std::erfc(u);
  } else if (beta_ == 1.0) {
    tail = 0.5 * std::exp(-u);
  } else {
    tail = 0.5 * boost::math::gamma_q(1.0 / beta_, std::pow(u, beta_));
  }
  return w < 0.0 ? tail : 1.0 - tail;
}

double NoiseDensity::pdf_derivative(double w) const {
  require_density(*this, "pdf_derivative");
  if (beta_ == 1.0 && w == 0.0) {
    throw Error(ErrorKind::kNotDifferentiable, "Laplacian density has a cusp at the origin");
  }
  return pdf_derivative_ae(w);
}

double NoiseDensity::pdf_derivative_ae(double w) const noexcept {
  if (!has_density() || w == 0.0) return 0.0;
  const double u = std::abs(w) / alpha_;
  const double f = pdf(w);
  double slope;
  if (beta_ == 2.0) {
    slope = 2.0 * u / alpha_;
  } else if (beta_ == 1.0) {
    slope = 1.0 / alpha_;
  } else {
    slope = beta_ * std::pow(u, beta_ - 1.0) / alpha_;
  }
  return w > 0.0 ? -slope * f : slope * f;
}

double NoiseDensity::normalized_one_sided_mean() const {
  require_density(*this, "normalized_one_sided_mean");
  // alpha Gamma(2/b) / (2 Gamma(1/b)), divided by sigma.
  return (alpha_ / sigma_) * std::tgamma(2.0 / beta_) / (2.0 * std::tgamma(1.0 / beta_));
}

double NoiseDensity::normalized_fourth_moment() const {
  require_density(*this, "normalized_fourth_moment");
  const double g3 = std::tgamma(3.0 / beta_);
  return std::tgamma(5.0 / beta_) * std::tgamma(1.0 / beta_) / (g3 * g3);
}

double NoiseDensity::tail_radius() const noexcept {
  if (!has_density()) return 0.0;
  return alpha_ * std::pow(kTailExponent, 1.0 / beta_);
}

ConditionCheck check_threshold_optimality_condition(const NoiseDensity& d, double grid_step) {
  require_density(d, "check_threshold_optimality_condition");
  if (!(d.beta() > 1.0)) {
    throw Error(ErrorKind::kNotDifferentiable,
                "derivative condition needs beta > 1; the Laplacian density is not "
                "differentiable at the origin");
  }
  if (!(grid_step > 0.0) || grid_step > 1.0) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("grid_step must be in (0, 1], got {}", grid_step));
  }
  constexpr double kSlack = 1e-12;
  const auto n = static_cast<long>(std::ceil(1.0 / grid_step - 1e-9));
  ConditionCheck out;
  out.worst.value = -std::numeric_limits<double>::infinity();
  for (long i = 0; i <= n; ++i) {
    const double w = std::min(1.0, static_cast<double>(i) * grid_step);
    for (long j = 0; j <= n; ++j) {
      const double z = std::min(1.0, static_cast<double>(j) * grid_step);
      const double v = d.pdf_derivative(w - z) + d.pdf_derivative(w + z);
      if (v > out.worst.value) out.worst = {w, z, v};
    }
  }
  out.holds = out.worst.value <= kSlack;
  return out;
}

}  // namespace qdesign
