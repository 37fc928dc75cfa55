#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qdesign/noise.hpp"

namespace qdesign {

// Probability-form one-bit quantizers gamma(x) = P(Y = S1 | x).
//
// Every variant here is antisymmetric, gamma(x) + gamma(-x) = 1. Values for
// x > 0 are always computed as 1 - gamma(-x) so the identity holds exactly in
// floating point.
class Quantizer {
 public:
  struct Threshold {};
  struct Sine {};
  struct Dithered {
    NoiseDensity dither;
  };
  // Slopes m_1..m_K on the uniform grid x_i = -(K - i)/K of [-1, 0].
  struct PiecewiseLinear {
    std::vector<double> slopes;
    std::vector<double> nodes;  // a_0 = 0, a_k = a_{k-1} + m_k / K
  };
  // Linear interpolation of node values on [-radius, 0]; zero below -radius.
  struct Tabulated {
    double radius = 1.0;
    std::vector<double> values;
  };
  struct Truncated {
    std::shared_ptr<const Quantizer> inner;
  };
  struct Complement {
    std::shared_ptr<const Quantizer> inner;
  };

  using Variant =
      std::variant<Threshold, Sine, Dithered, PiecewiseLinear, Tabulated, Truncated, Complement>;

  static Quantizer threshold();
  static Quantizer sine();
  // Threshold after additive dither of the given family shape and variance.
  static Quantizer dithered(const NoiseDensity& dither_family, double dither_sigma2);
  // Throws InvalidSlopesError naming the violated prefix.
  static Quantizer piecewise_linear(std::vector<double> slopes);
  static Quantizer tabulated(double radius, std::vector<double> values);
  // 1 - gamma(x). Antisymmetric but decreasing, so never admissible.
  static Quantizer complement(const Quantizer& q);

  const Variant& variant() const noexcept { return v_; }
  std::string name() const;

  double evaluate(double x) const;

  // gamma'(x) where it exists; +inf at a jump. Cell-interior slope convention
  // (right-continuous) at piecewise-linear nodes.
  double derivative(double x) const;

  // gamma is constant outside [lower(), upper()]: equal to left_value() below
  // and right_value() above. Bounds may be infinite.
  double lower() const;
  double upper() const;
  double left_value() const;
  double right_value() const;

  // gamma(x) = 0 for x < -1 (and 1 for x > 1).
  bool is_unit_support() const;

  // Points in [lower(), upper()] where gamma has a kink or jump, sorted.
  std::vector<double> breakpoints() const;

  // Piecewise-linear only.
  std::size_t grid_intervals() const;
  std::span<const double> slopes() const;

 private:
  friend Quantizer truncate_to_unit_support(const Quantizer& q);

  explicit Quantizer(Variant v) : v_(std::move(v)) {}

  double evaluate_nonpositive(double x) const;
  double derivative_nonpositive(double x) const;

  Variant v_;
};

// Sum-of-slopes tolerance for piecewise-linear construction.
inline constexpr double kSlopeSumTolerance = 1e-9;

// gamma~(x): gamma on [-1, 1], 0 below, 1 above. Returns unit-support inputs
// unchanged, so the operation is idempotent.
Quantizer truncate_to_unit_support(const Quantizer& q);

// One generative draw: returns 1 iff u < gamma(x).
int sample_output(const Quantizer& q, double x, double u);

}  // namespace qdesign
