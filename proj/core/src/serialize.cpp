#include "qdesign/serialize.hpp"

#include <fmt/format.h>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qdesign/errors.hpp"

namespace qdesign {
namespace {

using nlohmann::ordered_json;

// JSON has no infinity; an unbounded CRB is written as null.
ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

std::string aupl_to_json(std::span<const double> slopes) {
  ordered_json j;
  j["K"] = slopes.size();
  j["slopes"] = std::vector<double>(slopes.begin(), slopes.end());
  return j.dump(2) + "\n";
}

std::vector<double> aupl_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    auto slopes = j.at("slopes").get<std::vector<double>>();
    const auto K = j.at("K").get<std::size_t>();
    if (K != slopes.size()) {
      throw Error(ErrorKind::kParse, fmt::format("K = {} but {} slopes given", K, slopes.size()));
    }
    return slopes;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("bad AUPL JSON: {}", e.what()));
  }
}

std::vector<double> load_aupl_file(const std::string& path) { return aupl_from_json(read_file(path)); }

std::string design_to_json(const DesignResult& r) {
  ordered_json j;
  j["K"] = r.K;
  j["L"] = r.L;
  j["slopes"] = r.slopes;
  j["phi"] = number(r.phi);
  j["start_label"] = r.start_label;
  j["converged"] = r.converged;
  return j.dump(2) + "\n";
}

std::string profile_csv(const CrbProfile& p) {
  std::string out = "theta,g,crb\n";
  for (std::size_t i = 0; i < p.thetas.size(); ++i) {
    out += fmt::format("{},{},{}\n", p.thetas[i], p.g_values[i], p.crb_values[i]);
  }
  return out;
}

std::string profile_sidecar_json(const CrbProfile& p) {
  ordered_json j;
  j["phi"] = number(p.phi);
  j["argmax_theta"] = p.argmax_theta;
  j["L"] = p.L;
  return j.dump(2) + "\n";
}

std::string shape_csv(const Quantizer& q, int points, double lo, double hi) {
  std::string out = "x,gamma\n";
  for (int i = 0; i < points; ++i) {
    const double x = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    out += fmt::format("{},{}\n", x, q.evaluate(x));
  }
  return out;
}

std::string g_curve_csv(const Quantizer& q, const NoiseDensity& d, int L) {
  std::string out = "theta,g\n";
  for (int i = 0; i <= 2 * L; ++i) {
    const double theta = -1.0 + static_cast<double>(i) / L;
    out += fmt::format("{},{}\n", theta, g_of_theta(q, d, theta));
  }
  return out;
}

std::string sim_report_json(const SimReport& r) {
  ordered_json j;
  j["theta"] = r.theta_true;
  j["N"] = r.N;
  j["trials"] = r.trials;
  j["empirical_mse"] = r.empirical_mse;
  j["empirical_bias"] = r.empirical_bias;
  j["crb_over_N"] = number(r.crb_over_N);
  j["efficiency"] = number(r.efficiency);
  j["clamp_count"] = r.clamp_count;
  j["mean_output"] = r.mean_output;
  return j.dump(2) + "\n";
}

std::string sim_csv_header() { return "theta,N,trials,mse,bias,crb_over_N,efficiency,clamps\n"; }

std::string sim_csv_row(const SimReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{}\n", r.theta_true, r.N, r.trials, r.empirical_mse,
                     r.empirical_bias, r.crb_over_N, r.efficiency, r.clamp_count);
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "sigma,quantizer,min_fisher_info,phi\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.sigma, r.quantizer, r.min_fisher_info, r.phi);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << content) || !f.flush()) {
    throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path));
  }
}

void append_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f || !(f << content) || !f.flush()) {
    throw Error(ErrorKind::kIo, fmt::format("cannot append to '{}'", path));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace qdesign
