#pragma once

#include <cstdint>
#include <vector>

#include "qdesign/noise.hpp"
#include "qdesign/quantizer.hpp"
#include "qdesign/rng.hpp"

namespace qdesign {

struct SimConfig {
  double theta_true = 0.0;  // in [-1, 1]
  int N = 1;                // sensors per trial
  int trials = 1;
  std::uint64_t seed = 0;
  Quantizer quantizer = Quantizer::threshold();
  NoiseDensity noise = NoiseDensity::gaussian(1.0);
};

struct SimReport {
  double theta_true = 0.0;
  int N = 0;
  int trials = 0;
  double empirical_mse = 0.0;
  double empirical_bias = 0.0;
  double crb_over_N = 0.0;
  double efficiency = 0.0;  // crb_over_N / empirical_mse
  int clamp_count = 0;
  double mean_output = 0.0;  // fraction of Y = 1 over all sensors and trials
};

// Fusion-center ML estimator: theta_hat = g^{-1}(Ybar) by bisection on
// [-1, 1]. Ybar only takes the N+1 values k/N, so inversions are cached per k.
class MlInverter {
 public:
  MlInverter(const Quantizer& q, const NoiseDensity& d, int N);

  struct Estimate {
    double theta;
    bool clamped;
  };
  // ones = number of sensors that reported Y = 1.
  Estimate estimate(int ones) const;

  // g^{-1}(y) for arbitrary y, with the same clamping rule.
  Estimate invert(double y) const;

  double g_lower() const { return g_lo_; }
  double g_upper() const { return g_hi_; }

 private:
  const Quantizer* q_;
  const NoiseDensity* d_;
  int N_;
  double g_lo_, g_hi_;
  std::vector<Estimate> table_;
};

struct TrialOutcome {
  double theta_hat;
  bool clamped;
  int ones;
};

// One trial with its own substream: N noise draws, N quantizer draws, ML.
TrialOutcome run_trial(const SimConfig& cfg, const MlInverter& inverter, Philox4x32& rng);

// Draw of W from the configured noise.
double sample_noise(const NoiseDensity& d, Philox4x32& rng);

// Throws Error{kInvalidParameter} for bad configuration and
// Error{kInadmissible} if the quantizer is not admissible under the noise.
SimReport run(const SimConfig& cfg);

}  // namespace qdesign
