#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdesign/crb.hpp"
#include "qdesign/noise.hpp"
#include "qdesign/quantizer.hpp"

namespace qdesign {

// Antisymmetric unit-support piecewise-linear (AUPL) quantizer design.
//
// With gamma_P piecewise linear on the K cells D_k = [x_{k-1}, x_k] of
// [-1, 0], both g and g' at each parameter grid point theta_l = -l/L are
// affine in the slope vector m:
//
//   g(theta_l)  = a_l' m + F_l,   a_l = J q_l  + r_l
//   g'(theta_l) = c_l' m + f_l,   c_l = J q_l' + r_l'
//
//   [q_l]_k = (1/K) int_{D_k} xi(theta_l, x) dx
//   [r_l]_k =       int_{D_k} x xi(theta_l, x) dx
//
// so the discretized maximum CRB is a max of L+1 fractional quadratics in m.
struct AuplCoefficients {
  int K = 0;
  int L = 0;
  std::vector<double> thetas;  // L+1 entries, theta_l = -l/L
  // Row-major (L+1) x K blocks.
  std::vector<double> q, r, dq, dr, a, c;
  std::vector<double> F, f;  // L+1 entries

  std::span<const double> q_row(int l) const { return row(q, l); }
  std::span<const double> r_row(int l) const { return row(r, l); }
  std::span<const double> a_row(int l) const { return row(a, l); }
  std::span<const double> c_row(int l) const { return row(c, l); }

 private:
  std::span<const double> row(const std::vector<double>& v, int l) const {
    return std::span<const double>(v).subspan(static_cast<std::size_t>(l) * K, K);
  }
};

// K x K upper-triangular J, row-major: diagonal K, K-1, ..., 1, ones above.
std::vector<double> j_matrix(int K);

// Interval integrals of xi and x xi by quadrature on each cell; their theta
// derivatives integrate the analytic d(xi)/d(theta) in closed form, which is
// exact for the Laplacian cusp as well.
AuplCoefficients precompute_coefficients(const NoiseDensity& d, int K, int L);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<int> active;  // indices l within 1e-12 (relative) of the max
};

// T_l(m) = g_l (1 - g_l) / h_l^2, g_l = a_l'm + F_l, h_l = c_l'm + f_l.
// Saturated g_l gives +inf. Throws Error{kInadmissibleIterate} when some
// h_l <= 0.
double objective_term(const AuplCoefficients& co, int l, std::span<const double> m);
ObjectiveValue objective(const AuplCoefficients& co, std::span<const double> m);

// Gradient of the active term, averaged over ties:
//   ((1 - 2 g)/h^2) a_l - (2 g (1 - g)/h^3) c_l.
std::vector<double> objective_subgradient(const AuplCoefficients& co, std::span<const double> m);

struct StartingPoint {
  std::string label;
  std::vector<double> slopes;
};

// Closest AUPL counterparts of the threshold quantizer, m = (0, ..., 0, K/2),
// and of the sine quantizer, m_k = K (gamma_0(x_k) - gamma_0(x_{k-1})).
std::vector<StartingPoint> starting_points(int K);

struct DesignOptions {
  int K = 0;  // 0: default_design_grid(sigma)
  int L = 0;  // 0: same as K
  std::vector<StartingPoint> extra_starts;
  int random_starts = 0;
  std::uint64_t seed = 0x5eed;
  int max_iterations = 2000;
  double violation_tol = 1e-8;
  double relative_change_tol = 1e-10;
  int stall_window = 5;
};

struct StartDiagnostics {
  std::string label;
  double phi_start = 0.0;
  double phi_end = 0.0;
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
  std::string message;
};

struct DesignResult {
  int K = 0;
  int L = 0;
  std::vector<double> slopes;
  double phi = 0.0;  // discretized objective at slopes
  std::string start_label;
  int iterations = 0;
  bool converged = false;
  CrbProfile profile;  // recomputed by quadrature, independent of coefficients
  std::vector<StartDiagnostics> runs;
};

// ceil(10/sigma) clamped to [50, 400].
int default_design_grid(double sigma);

// Minimax design: minimize max_l T_l(m) subject to 0 <= sum_{j<=k} m_j <= K
// and sum m = K/2, from every starting point. Best feasible run wins; ties go
// to the earlier start. Throws Error{kOptimizationFailure} when no start
// yields a feasible finite design.
DesignResult design(const NoiseDensity& d, const DesignOptions& options = {});

// Lower-level entry point on precomputed coefficients (no quadrature
// validation; profile left empty).
DesignResult design_with_coefficients(const AuplCoefficients& co, const DesignOptions& options);

}  // namespace qdesign
