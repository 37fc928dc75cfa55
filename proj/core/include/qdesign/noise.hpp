#pragma once


namespace qdesign {

enum class NoiseFamily { kGeneralizedGaussian, kPointMass };

// Symmetric zero-mean noise density. Generalized Gaussian with shape beta
// (1 = Laplacian, 2 = Gaussian) and variance sigma2, or the degenerate point
// mass at zero. Immutable once constructed.
//
//   f(w) = beta / (2 alpha Gamma(1/beta)) exp(-(|w|/alpha)^beta),
//   alpha^2 = sigma2 Gamma(1/beta) / Gamma(3/beta).
class NoiseDensity {
 public:
  static NoiseDensity generalized_gaussian(double beta, double sigma2);
  static NoiseDensity gaussian(double sigma2) { return generalized_gaussian(2.0, sigma2); }
  static NoiseDensity laplacian(double sigma2) { return generalized_gaussian(1.0, sigma2); }
  static NoiseDensity point_mass();

  NoiseFamily family() const noexcept { return family_; }
  bool has_density() const noexcept { return family_ == NoiseFamily::kGeneralizedGaussian; }
  double beta() const noexcept { return beta_; }
  double sigma2() const noexcept { return sigma2_; }
  double sigma() const noexcept { return sigma_; }
  double alpha() const noexcept { return alpha_; }

  // Same shape, different variance. Throws for the point mass.
  NoiseDensity with_sigma2(double sigma2) const;

  // Throws Error{kNoDensity} for the point mass.
  double pdf(double w) const;

  // Unit step at zero for the point mass (1 for w >= 0).
  double cdf(double w) const;

  // f'(w). For beta == 1 the density has a cusp at 0 and this throws
  // Error{kNotDifferentiable} there.
  double pdf_derivative(double w) const;

  // f'(w) with f'(0) := 0 for the Laplacian cusp. Only meaningful inside
  // integrals, where the cusp is a null set.
  double pdf_derivative_ae(double w) const noexcept;

  // mu_1 = sigma^-1 * int_0^inf w f(w) dw.
  double normalized_one_sided_mean() const;

  // sigma^-4 * int w^4 f(w) dw (the kurtosis).
  double normalized_fourth_moment() const;

  // Radius outside of which the two-sided tail mass is below ~1e-17. Zero for
  // the point mass.
  double tail_radius() const noexcept;

  bool is_gaussian() const noexcept { return has_density() && beta_ == 2.0; }
  bool is_laplacian() const noexcept { return has_density() && beta_ == 1.0; }

 private:
  NoiseDensity() = default;

  NoiseFamily family_ = NoiseFamily::kPointMass;
  double beta_ = 0.0;
  double sigma2_ = 0.0;
  double sigma_ = 0.0;
  double alpha_ = 0.0;
  double norm_ = 0.0;  // beta / (2 alpha Gamma(1/beta))
};

struct ConditionWitness {
  double w = 0.0;
  double z = 0.0;
  double value = 0.0;  // f'(w-z) + f'(w+z) at the witness
};

struct ConditionCheck {
  bool holds = false;
  // Grid point with the largest value of f'(w-z) + f'(w+z); a violation
  // witness when holds is false.
  ConditionWitness worst;
};

inline constexpr double kConditionDefaultGridStep = 1e-3;

// Dense-grid check of f'(w-z) + f'(w+z) <= 0 over (w, z) in [0,1]^2, the
// derivative condition under which the threshold quantizer dominates every
// antisymmetric quantizer. Requires beta > 1.
ConditionCheck check_threshold_optimality_condition(
    const NoiseDensity& d, double grid_step = kConditionDefaultGridStep);

}  // namespace qdesign
