#include "qdesign/sim.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <random>

#include "qdesign/crb.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/parallel.hpp"

namespace qdesign {

MlInverter::MlInverter(const Quantizer& q, const NoiseDensity& d, int N)
    : q_(&q), d_(&d), N_(N), g_lo_(g_of_theta(q, d, -1.0)), g_hi_(g_of_theta(q, d, 1.0)) {
  table_.resize(static_cast<std::size_t>(N) + 1);
  parallel_for(table_.size(), [&](std::size_t k) {
    table_[k] = invert(static_cast<double>(k) / N_);
  });
}

MlInverter::Estimate MlInverter::invert(double y) const {
  if (y < g_lo_) return {-1.0, true};
  if (y > g_hi_) return {1.0, true};
  double lo = -1.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (g_of_theta(*q_, *d_, mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

MlInverter::Estimate MlInverter::estimate(int ones) const { return table_.at(ones); }

double sample_noise(const NoiseDensity& d, Philox4x32& rng) {
  if (!d.has_density()) return 0.0;
  if (d.is_gaussian()) return std::normal_distribution<double>(0.0, d.sigma())(rng);
  // |W|/alpha raised to beta is Gamma(1/beta, 1).
  const double b = d.beta();
  const double mag = std::pow(std::gamma_distribution<double>(1.0 / b, 1.0)(rng), 1.0 / b);
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return sign * d.alpha() * mag;
}

TrialOutcome run_trial(const SimConfig& cfg, const MlInverter& inverter, Philox4x32& rng) {
  int ones = 0;
  for (int n = 0; n < cfg.N; ++n) {
    const double x = cfg.theta_true + sample_noise(cfg.noise, rng);
    ones += sample_output(cfg.quantizer, x, rng.uniform());
  }
  const auto e = inverter.estimate(ones);
  return {e.theta, e.clamped, ones};
}

SimReport run(const SimConfig& cfg) {
  if (!(cfg.theta_true >= -1.0 && cfg.theta_true <= 1.0)) {
    throw Error(ErrorKind::kInvalidParameter,
                fmt::format("theta must lie in [-1, 1] (got {})", cfg.theta_true));
  }
  if (cfg.N < 1 || cfg.trials < 1) {
    throw Error(ErrorKind::kInvalidParameter, "N and trials must be positive");
  }
  const int L = cfg.noise.has_density() ? default_crb_grid(cfg.noise.sigma()) : 100;
  if (!is_admissible(cfg.quantizer, cfg.noise, L)) {
    throw Error(ErrorKind::kInadmissible,
                fmt::format("quantizer '{}' is not admissible under this noise", cfg.quantizer.name()));
  }
  const MlInverter inverter(cfg.quantizer, cfg.noise, cfg.N);
  std::vector<TrialOutcome> outcomes(cfg.trials);
  parallel_for(outcomes.size(), [&](std::size_t t) {
    Philox4x32 rng(cfg.seed, t);
    outcomes[t] = run_trial(cfg, inverter, rng);
  });

  SimReport rep;
  rep.theta_true = cfg.theta_true;
  rep.N = cfg.N;
  rep.trials = cfg.trials;
  double sq = 0.0, err = 0.0, ones = 0.0;
  for (const auto& o : outcomes) {
    const double e = o.theta_hat - cfg.theta_true;
    sq += e * e;
    err += e;
    ones += o.ones;
    rep.clamp_count += o.clamped ? 1 : 0;
  }
  rep.empirical_mse = sq / cfg.trials;
  rep.empirical_bias = err / cfg.trials;
  rep.mean_output = ones / (static_cast<double>(cfg.trials) * cfg.N);
  rep.crb_over_N = crb(cfg.quantizer, cfg.noise, cfg.theta_true) / cfg.N;
  rep.efficiency = rep.empirical_mse > 0.0 ? rep.crb_over_N / rep.empirical_mse
                                           : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace qdesign
