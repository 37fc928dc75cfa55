#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <functional>
#include <limits>
#include <optional>

#include "qdesign/aupl.hpp"
#include "qdesign/crb.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/parallel.hpp"
#include "qdesign/serialize.hpp"
#include "qdesign/sim.hpp"
#include "qdesign/spec_strings.hpp"

namespace qdesign::cli {
namespace {

namespace fs = std::filesystem;

// Exit code for a library error that escapes a command.
int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kOptimizationFailure:
    case ErrorKind::kNumericalFailure:
    case ErrorKind::kDegenerateProbability:
    case ErrorKind::kInadmissibleIterate:
      return kOptimizationFailed;
    case ErrorKind::kInadmissible:
      return kInadmissibleModel;
    default:
      return kUsage;
  }
}

// Re-raises parse problems with the flag that carried the text.
template <class F>
auto for_flag(std::string_view flag, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse || e.kind() == ErrorKind::kInvalidParameter ||
        e.kind() == ErrorKind::kInvalidSlopes || e.kind() == ErrorKind::kIo) {
      std::string_view msg = e.what();
      const std::string_view prefix = to_string(e.kind());
      if (msg.starts_with(prefix)) msg.remove_prefix(std::min(msg.size(), prefix.size() + 2));
      throw Error(e.kind(), fmt::format("{}: {}", flag, msg));
    }
    throw;
  }
}

fs::path sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

double inverse(double phi) { return std::isfinite(phi) ? 1.0 / phi : 0.0; }

struct DesignArgs {
  std::string noise;
  int K = 0;
  int L = 0;
  int random_starts = 0;
  std::uint64_t seed = 0x5eed;
  int max_iterations = 2000;
  std::string out;
};

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
  const NoiseDensity d = for_flag("--noise", [&] { return parse_noise(a.noise); });
  if (!d.has_density()) {
    throw Error(ErrorKind::kNoDensity, "--noise: design needs a noise density (pointmass has none)");
  }
  DesignOptions opt;
  opt.K = a.K;
  opt.L = a.L;
  opt.random_starts = a.random_starts;
  opt.seed = a.seed;
  opt.max_iterations = a.max_iterations;
  const DesignResult r = design(d, opt);
  const Quantizer q = Quantizer::piecewise_linear(r.slopes);
  write_file(a.out, design_to_json(r));
  write_file(sibling(a.out, ".shape.csv").string(), shape_csv(q));
  write_file(sibling(a.out, ".g.csv").string(), g_curve_csv(q, d, r.L));
  write_file(sibling(a.out, ".profile.csv").string(), profile_csv(r.profile));

  const double thr = max_crb(Quantizer::threshold(), d, r.L).phi;
  const double sine = max_crb(Quantizer::sine(), d, r.L).phi;
  fmt::print(out, "noise {}\nK {}\nL {}\n", describe(d), r.K, r.L);
  fmt::print(out, "phi {}\nphi_quadrature {}\nstart {}\niterations {}\nconverged {}\n", r.phi, r.profile.phi,
             r.start_label, r.iterations, r.converged);
  fmt::print(out, "phi_threshold {}\nphi_sine {}\n", thr, sine);
  for (const auto& run : r.runs) {
    fmt::print(out, "run {} phi {} -> {} iterations {} converged {} ({})\n", run.label, run.phi_start, run.phi_end,
               run.iterations, run.converged, run.message);
  }
  if (!r.converged) {
    fmt::print(err, "design: best run did not converge\n");
    return kOptimizationFailed;
  }
  return kOk;
}

struct SweepArgs {
  std::string family;
  std::vector<double> sigmas;
  int count = 40;
  double sigma_min = 0.05;
  double sigma_max = 8.0;
  std::vector<std::string> quantizers{"threshold", "sine", "dither", "aupl"};
  int L = 0;
  int K = 0;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& /*err*/) {
  const FamilySpec fam = for_flag("--family", [&] { return parse_family(a.family); });
  std::vector<double> sigmas = a.sigmas;
  if (sigmas.empty()) {
    if (a.count < 2 || !(a.sigma_min > 0.0) || !(a.sigma_max > a.sigma_min)) {
      throw Error(ErrorKind::kInvalidParameter, "--count/--min/--max: need count >= 2 and 0 < min < max");
    }
    const double step = std::log(a.sigma_max / a.sigma_min) / (a.count - 1);
    for (int i = 0; i < a.count; ++i) sigmas.push_back(a.sigma_min * std::exp(step * i));
    sigmas.back() = a.sigma_max;
  }
  for (double s : sigmas) {
    if (!(s > 0.0)) throw Error(ErrorKind::kInvalidParameter, fmt::format("--sigmas: {} is not positive", s));
  }
  std::sort(sigmas.begin(), sigmas.end());
  for (const auto& name : a.quantizers) {
    if (name != "threshold" && name != "sine" && name != "dither" && name != "aupl") {
      throw Error(ErrorKind::kParse, fmt::format("--quantizers: unknown quantizer '{}'", name));
    }
  }
  const bool want_dither = std::find(a.quantizers.begin(), a.quantizers.end(), "dither") != a.quantizers.end();
  const double sigma_f = want_dither ? critical_sigma(fam.beta).sigma : 0.0;

  const std::size_t nq = a.quantizers.size();
  std::vector<SweepRow> rows(sigmas.size() * nq);
  parallel_for(rows.size(), [&](std::size_t i) {
    const double sigma = sigmas[i / nq];
    const std::string& name = a.quantizers[i % nq];
    const NoiseDensity d = NoiseDensity::generalized_gaussian(fam.beta, sigma * sigma);
    const int L = a.L > 0 ? a.L : default_crb_grid(sigma);
    double phi = 0.0;
    if (name == "threshold") {
      phi = max_crb(Quantizer::threshold(), d, L).phi;
    } else if (name == "sine") {
      phi = max_crb(Quantizer::sine(), d, L).phi;
    } else if (name == "dither") {
      // Top the noise up to the critical level; above it, dithering only hurts.
      const double var = std::max(0.0, sigma_f * sigma_f - sigma * sigma);
      const Quantizer q = var > 0.0 ? Quantizer::dithered(d, var) : Quantizer::threshold();
      phi = max_crb(q, d, L).phi;
    } else {
      DesignOptions opt;
      opt.K = a.K;
      opt.L = a.L;
      phi = design(d, opt).profile.phi;
    }
    rows[i] = {sigma, name, inverse(phi), phi};
  });
  write_file(a.out, sweep_csv(rows));
  fmt::print(out, "wrote {} rows to {}\n", rows.size(), a.out);
  if (want_dither) fmt::print(out, "critical sigma {}\n", sigma_f);
  return kOk;
}

int cmd_limits(const std::string& family, std::ostream& out) {
  const FamilySpec fam = for_flag("--family", [&] { return parse_family(family); });
  const NoiseDensity d = NoiseDensity::generalized_gaussian(fam.beta, 1.0);
  const double mu1 = d.normalized_one_sided_mean();
  const double from_mean = sine_high_snr_limit_from_mean(mu1);
  const double closed = sine_high_snr_limit(d);
  const double gap = std::abs(from_mean - closed);
  fmt::print(out, "beta {}\nmu1 {}\nlimit_from_mean {}\nlimit_closed_form {}\ndifference {}\nagree {}\n", fam.beta,
             mu1, from_mean, closed, gap, gap <= 1e-10);
  fmt::print(out, "lower_bound_8_over_pi2 {}\n", 8.0 / (std::numbers::pi * std::numbers::pi));
  return kOk;
}

struct SimulateArgs {
  std::string noise;
  std::string quantizer = "threshold";
  double theta = 0.0;
  int N = 1000;
  int trials = 5000;
  std::uint64_t seed = 1;
  std::string csv;
  std::string json;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig cfg;
  cfg.noise = for_flag("--noise", [&] { return parse_noise(a.noise); });
  cfg.quantizer = for_flag("--quantizer", [&] { return parse_quantizer(a.quantizer, cfg.noise); });
  if (!(a.theta >= -1.0 && a.theta <= 1.0)) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("--theta: {} is outside [-1, 1]", a.theta));
  }
  cfg.theta_true = a.theta;
  cfg.N = a.N;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  const SimReport r = run(cfg);
  fmt::print(out, "{}", sim_report_json(r));
  if (!a.csv.empty()) {
    const bool fresh = !fs::exists(a.csv) || fs::file_size(a.csv) == 0;
    append_file(a.csv, (fresh ? sim_csv_header() : std::string()) + sim_csv_row(r));
  }
  if (!a.json.empty()) write_file(a.json, sim_report_json(r));
  return kOk;
}

int cmd_check_condition(const std::string& noise, double step, std::ostream& out) {
  const NoiseDensity d = for_flag("--noise", [&] { return parse_noise(noise); });
  if (!d.has_density() || d.beta() <= 1.0) {
    throw Error(ErrorKind::kNotDifferentiable,
                "--noise: the condition needs a differentiable density; the Laplacian (beta = 1) has a cusp at 0");
  }
  if (!(step > 0.0 && step <= 1.0)) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("--grid-step: {} is not in (0, 1]", step));
  }
  const ConditionCheck c = check_threshold_optimality_condition(d, step);
  fmt::print(out, "{}\n", c.holds);
  if (!c.holds) fmt::print(out, "witness w={} z={} value={}\n", c.worst.w, c.worst.z, c.worst.value);
  return kOk;
}

int cmd_critical_sigma(const std::string& family, std::ostream& out) {
  const FamilySpec fam = for_flag("--family", [&] { return parse_family(family); });
  const CriticalSigma c = critical_sigma(fam.beta);
  fmt::print(out, "beta {}\nsigma {}\nphi {}\n", fam.beta, c.sigma, c.phi);
  return kOk;
}

struct CurveArgs {
  std::string noise;
  std::string quantizer = "threshold";
  int L = 0;
  std::string out;
};

int cmd_crb_curve(const CurveArgs& a, std::ostream& out) {
  const NoiseDensity d = for_flag("--noise", [&] { return parse_noise(a.noise); });
  const Quantizer q = for_flag("--quantizer", [&] { return parse_quantizer(a.quantizer, d); });
  const int L = a.L > 0 ? a.L : (d.has_density() ? default_crb_grid(d.sigma()) : 100);
  const CrbProfile p = for_flag("--L", [&] { return max_crb(q, d, L); });
  write_file(a.out, profile_csv(p));
  const std::string side = sibling(a.out, ".json").string();
  write_file(side, profile_sidecar_json(p));
  fmt::print(out, "phi {}\nargmax_theta {}\nL {}\nadmissible {}\n", p.phi, p.argmax_theta, p.L,
             is_admissible(q, d, L));
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and analysis of one-bit probabilistic quantizers for distributed estimation", "qdesign"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1);
  std::function<int()> action;

  DesignArgs da;
  auto* design_cmd = app.add_subcommand("design", "Design a minimax AUPL quantizer for a noise density");
  design_cmd->add_option("--noise", da.noise, "gg:beta=<b>,sigma=<s>")->required();
  design_cmd->add_option("--K", da.K, "observation grid intervals (default ceil(10/sigma) in [50, 400])");
  design_cmd->add_option("--L", da.L, "parameter grid intervals (default K)");
  design_cmd->add_option("--random-starts", da.random_starts, "extra jittered starting points");
  design_cmd->add_option("--seed", da.seed, "seed for the jittered starts");
  design_cmd->add_option("--max-iterations", da.max_iterations, "solver iteration cap per start");
  design_cmd->add_option("--out", da.out, "DesignResult JSON; shape, g and profile CSVs go alongside")->required();
  design_cmd->callback([&] { action = [&] { return cmd_design(da, out, err); }; });

  SweepArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Minimum Fisher information against noise level");
  sweep_cmd->add_option("--family", sa.family, "gg:beta=<b>, gaussian or laplacian")->required();
  sweep_cmd->add_option("--sigmas", sa.sigmas, "explicit sigma values")->delimiter(',');
  sweep_cmd->add_option("--count", sa.count, "number of log-spaced sigma values");
  sweep_cmd->add_option("--min", sa.sigma_min, "smallest sigma");
  sweep_cmd->add_option("--max", sa.sigma_max, "largest sigma");
  sweep_cmd->add_option("--quantizers", sa.quantizers, "subset of threshold,sine,dither,aupl")->delimiter(',');
  sweep_cmd->add_option("--L", sa.L, "parameter grid (default per sigma)");
  sweep_cmd->add_option("--K", sa.K, "AUPL observation grid (default per sigma)");
  sweep_cmd->add_option("--out", sa.out, "CSV sigma,quantizer,min_fisher_info,phi")->required();
  sweep_cmd->callback([&] { action = [&] { return cmd_sweep(sa, out, err); }; });

  std::string limits_family;
  auto* limits_cmd = app.add_subcommand("limits", "High-SNR limit of the sine quantizer's CRB at the boundary");
  limits_cmd->add_option("--family", limits_family, "gg:beta=<b>, gaussian or laplacian")->required();
  limits_cmd->callback([&] { action = [&] { return cmd_limits(limits_family, out); }; });

  SimulateArgs ma;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run of the fusion-center ML estimator");
  sim_cmd->add_option("--noise", ma.noise, "gg:beta=<b>,sigma=<s> or pointmass")->required();
  sim_cmd->add_option("--quantizer", ma.quantizer, "threshold, sine, dither:..., aupl:file=...");
  sim_cmd->add_option("--theta", ma.theta, "true parameter in [-1, 1]");
  sim_cmd->add_option("--N", ma.N, "sensors per trial");
  sim_cmd->add_option("--trials", ma.trials, "Monte Carlo trials");
  sim_cmd->add_option("--seed", ma.seed, "random seed");
  sim_cmd->add_option("--csv", ma.csv, "append a result row to this CSV");
  sim_cmd->add_option("--json", ma.json, "write the report as JSON");
  sim_cmd->callback([&] { action = [&] { return cmd_simulate(ma, out); }; });

  std::string cond_noise;
  double cond_step = kConditionDefaultGridStep;
  auto* cond_cmd = app.add_subcommand("check-condition", "Check f'(w-z) + f'(w+z) <= 0 on [0,1]^2");
  cond_cmd->add_option("--noise", cond_noise, "gg:beta=<b>,sigma=<s> with b > 1")->required();
  cond_cmd->add_option("--grid-step", cond_step, "grid spacing");
  cond_cmd->callback([&] { action = [&] { return cmd_check_condition(cond_noise, cond_step, out); }; });

  std::string crit_family;
  auto* crit_cmd = app.add_subcommand("critical-sigma", "Noise level minimizing the threshold quantizer's max CRB");
  crit_cmd->add_option("--family", crit_family, "gg:beta=<b>, gaussian or laplacian")->required();
  crit_cmd->callback([&] { action = [&] { return cmd_critical_sigma(crit_family, out); }; });

  CurveArgs ca;
  auto* curve_cmd = app.add_subcommand("crb-curve", "CRB profile of a quantizer over theta");
  curve_cmd->add_option("--noise", ca.noise, "gg:beta=<b>,sigma=<s> or pointmass")->required();
  curve_cmd->add_option("--quantizer", ca.quantizer, "threshold, sine, dither:..., aupl:file=...");
  curve_cmd->add_option("--L", ca.L, "parameter grid (default ceil(10/sigma) in [100, 2000])");
  curve_cmd->add_option("--out", ca.out, "CSV theta,g,crb; JSON sidecar alongside")->required();
  curve_cmd->callback([&] { action = [&] { return cmd_crb_curve(ca, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  }
  if (!action) return kUsage;
  try {
    return action();
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  }
}

}  // namespace qdesign::cli
