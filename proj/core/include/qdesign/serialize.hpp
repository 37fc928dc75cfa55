#pragma once

#include <span>
#include <string>
#include <vector>

#include "qdesign/aupl.hpp"
#include "qdesign/crb.hpp"
#include "qdesign/sim.hpp"

namespace qdesign {

// Numbers are written in shortest round-trip form, so output is byte-stable.

// {"K": int, "slopes": [...]}
std::string aupl_to_json(std::span<const double> slopes);
std::vector<double> aupl_from_json(const std::string& text);
std::vector<double> load_aupl_file(const std::string& path);

// {"K","L","slopes","phi","start_label","converged"}
std::string design_to_json(const DesignResult& r);

// theta,g,crb
std::string profile_csv(const CrbProfile& p);
// {"phi","argmax_theta","L"}
std::string profile_sidecar_json(const CrbProfile& p);

// x,gamma at `points` equally spaced x in [lo, hi].
std::string shape_csv(const Quantizer& q, int points = 1000, double lo = -1.5, double hi = 1.5);

// theta,g on the full grid -1 + i/L, i = 0..2L.
std::string g_curve_csv(const Quantizer& q, const NoiseDensity& d, int L);

std::string sim_report_json(const SimReport& r);
std::string sim_csv_header();
std::string sim_csv_row(const SimReport& r);

struct SweepRow {
  double sigma = 0.0;
  std::string quantizer;
  double min_fisher_info = 0.0;
  double phi = 0.0;
};
std::string sweep_csv(std::span<const SweepRow> rows);

// Throws Error{kIo}.
void write_file(const std::string& path, const std::string& content);
void append_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qdesign
