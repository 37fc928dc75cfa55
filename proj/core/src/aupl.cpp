#include "qdesign/aupl.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <optional>

#include "qdesign/dense_qp.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/parallel.hpp"
#include "qdesign/quadrature.hpp"
#include "qdesign/rng.hpp"

namespace qdesign {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool saturated(double g) { return !(g > kDegenerateEps && g < 1.0 - kDegenerateEps); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// J x for the upper-triangular J, via suffix sums: (K - i) x_i + sum_{k>=i} x_k.
void apply_j(std::span<const double> x, std::span<const double> add, std::span<double> out) {
  const std::size_t K = x.size();
  double suffix = 0.0;
  for (std::size_t i = K; i-- > 0;) {
    suffix += x[i];
    out[i] = static_cast<double>(K - 1 - i) * x[i] + suffix + add[i];
  }
}

// Node values v_1..v_{K-1} of gamma_P (v_0 = 0 and v_K = 1/2 are fixed) are
// the solver's variables: the prefix-sum and continuity constraints on the
// slopes become the box 0 <= v <= 1.
std::vector<double> slopes_from_nodes(const Eigen::VectorXd& v, int K) {
  std::vector<double> m(K);
  double prev = 0.0;
  for (int k = 0; k < K; ++k) {
    const double cur = (k + 1 < K) ? v[k] : 0.5;
    m[k] = K * (cur - prev);
    prev = cur;
  }
  return m;
}

Eigen::VectorXd nodes_from_slopes(std::span<const double> m) {
  const int K = static_cast<int>(m.size());
  Eigen::VectorXd v(std::max(0, K - 1));
  double acc = 0.0;
  for (int k = 0; k + 1 < K; ++k) {
    acc += m[k];
    v[k] = std::clamp(acc / K, 0.0, 1.0);
  }
  return v;
}

// g = g0 + A v and h = h0 + C v over the parameter grid.
struct AffineModel {
  Eigen::MatrixXd A, C;
  Eigen::VectorXd g0, h0;
};

AffineModel build_model(const AuplCoefficients& co) {
  const int K = co.K;
  const int rows = co.L + 1;
  const int n = K - 1;
  AffineModel md;
  md.A.resize(rows, n);
  md.C.resize(rows, n);
  md.g0.resize(rows);
  md.h0.resize(rows);
  for (int l = 0; l < rows; ++l) {
    const auto a = co.a_row(l);
    const auto c = co.c_row(l);
    for (int j = 0; j < n; ++j) {
      md.A(l, j) = K * (a[j] - a[j + 1]);
      md.C(l, j) = K * (c[j] - c[j + 1]);
    }
    md.g0[l] = co.F[l] + 0.5 * K * a[K - 1];
    md.h0[l] = co.f[l] + 0.5 * K * c[K - 1];
  }
  return md;
}

struct Evaluation {
  Eigen::VectorXd g, h, T;
  double phi = kInf;
  bool finite = false;
};

Evaluation evaluate(const AffineModel& md, const Eigen::VectorXd& v) {
  Evaluation e;
  e.g = md.g0 + md.A * v;
  e.h = md.h0 + md.C * v;
  e.T.resize(e.g.size());
  e.phi = -kInf;
  e.finite = true;
  for (Eigen::Index l = 0; l < e.g.size(); ++l) {
    const double g = e.g[l];
    const double h = e.h[l];
    if (!(h > 0.0) || saturated(g)) {
      e.T[l] = kInf;
      e.finite = false;
    } else {
      e.T[l] = g * (1.0 - g) / (h * h);
    }
    e.phi = std::max(e.phi, e.T[l]);
  }
  return e;
}

Eigen::MatrixXd gradients(const AffineModel& md, const Evaluation& e) {
  const Eigen::ArrayXd g = e.g.array();
  const Eigen::ArrayXd h = e.h.array();
  const Eigen::VectorXd wa = ((1.0 - 2.0 * g) / (h * h)).matrix();
  const Eigen::VectorXd wc = (2.0 * g * (1.0 - g) / (h * h * h)).matrix();
  return wa.asDiagonal() * md.A - wc.asDiagonal() * md.C;
}

struct RunOutcome {
  StartDiagnostics diag;
  Eigen::VectorXd v;
};

RunOutcome run_sqp(const AffineModel& md, Eigen::VectorXd v, const std::string& label,
                   const DesignOptions& opt) {
  RunOutcome out;
  out.diag.label = label;
  const int n = static_cast<int>(v.size());
  const int rows = static_cast<int>(md.g0.size());
  Evaluation ev = evaluate(md, v);
  out.diag.phi_start = ev.phi;
  out.v = v;
  if (!ev.finite) {
    out.diag.phi_end = kInf;
    out.diag.message = "objective is infinite at the starting point";
    return out;
  }
  out.diag.feasible = true;
  if (n == 0) {
    out.diag.phi_end = ev.phi;
    out.diag.converged = true;
    return out;
  }

  Eigen::MatrixXd grad = gradients(md, ev);
  double radius = 0.1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  {
    Eigen::Index top = 0;
    ev.T.maxCoeff(&top);
    B *= std::max(1e-8, grad.row(top).norm() / radius);
  }
  std::vector<double> history{ev.phi};

  QpProblem qp;
  qp.G = Eigen::MatrixXd::Zero(n + 1, n + 1);
  qp.g0 = Eigen::VectorXd::Zero(n + 1);
  qp.g0[n] = 1.0;
  const int m_cons = rows + 2 * n;
  qp.CI = Eigen::MatrixXd::Zero(n + 1, m_cons);
  qp.ci0.resize(m_cons);
  for (int j = 0; j < n; ++j) {
    qp.CI(j, rows + 2 * j) = 1.0;
    qp.CI(j, rows + 2 * j + 1) = -1.0;
  }

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    // Epigraph subproblem in (d, tau):
    //   min 0.5 d'Bd + 0.5 delta tau^2 + tau
    //   s.t. T_l + grad_l d <= phi + tau,  box and trust region on d.
    qp.G.topLeftCorner(n, n) = B;
    qp.G(n, n) = 1e-3 / std::max(ev.phi, 1e-12);
    for (int l = 0; l < rows; ++l) {
      qp.CI.col(l).head(n) = -grad.row(l).transpose();
      qp.CI(n, l) = 1.0;
      qp.ci0[l] = ev.phi - ev.T[l];
    }
    for (int j = 0; j < n; ++j) {
      qp.ci0[rows + 2 * j] = -std::max(-v[j], -radius);
      qp.ci0[rows + 2 * j + 1] = std::min(1.0 - v[j], radius);
    }
    const QpSolution sol = solve_qp(qp);
    if (!sol.ok) {
      out.diag.message = "QP subproblem failed: " + sol.message;
      break;
    }
    const Eigen::VectorXd step = sol.x.head(n);
    const double model = (ev.T + grad * step).maxCoeff();
    const double predicted = ev.phi - model;
    if (predicted <= 1e-13 * std::max(1.0, ev.phi)) {
      out.diag.converged = true;
      out.diag.message = "no predicted decrease";
      break;
    }
    const Eigen::VectorXd trial = (v + step).cwiseMax(0.0).cwiseMin(1.0);
    Evaluation next = evaluate(md, trial);
    const double actual = next.finite ? ev.phi - next.phi : -kInf;
    const double ratio = actual / predicted;
    const double step_norm = step.lpNorm<Eigen::Infinity>();
    if (ratio < 0.1) {
      // Covers inadmissible trial points (some g' <= 0): back off.
      radius = 0.25 * step_norm;
      if (radius < 1e-14) {
        out.diag.message = "trust region collapsed";
        out.diag.converged = predicted <= 1e-10 * std::max(1.0, ev.phi);
        break;
      }
      continue;
    }
    Eigen::MatrixXd next_grad = gradients(md, next);
    const Eigen::VectorXd lambda = sol.multipliers.head(rows);
    const Eigen::VectorXd s = trial - v;
    const Eigen::VectorXd y = (next_grad - grad).transpose() * lambda;
    const Eigen::VectorXd Bs = B * s;
    const double sBs = s.dot(Bs);
    double sy = s.dot(y);
    if (sBs > 0.0) {
      Eigen::VectorXd rvec = y;
      if (sy < 0.2 * sBs) {
        // Powell damping keeps B positive definite.
        const double theta = 0.8 * sBs / (sBs - sy);
        rvec = theta * y + (1.0 - theta) * Bs;
        sy = s.dot(rvec);
      }
      if (sy > 0.0) {
        if (it == 0) {
          B *= rvec.squaredNorm() / sy / (sBs / s.squaredNorm());
          const Eigen::VectorXd Bs2 = B * s;
          const double sBs2 = s.dot(Bs2);
          B += -(Bs2 * Bs2.transpose()) / sBs2 + (rvec * rvec.transpose()) / sy;
        } else {
          B += -(Bs * Bs.transpose()) / sBs + (rvec * rvec.transpose()) / sy;
        }
      }
    }
    v = trial;
    ev = std::move(next);
    grad = std::move(next_grad);
    if (ratio > 0.75 && step_norm > 0.99 * radius) radius = std::min(1.0, 2.0 * radius);
    history.push_back(ev.phi);
    const auto h = history.size();
    if (h > static_cast<std::size_t>(opt.stall_window)) {
      const double old = history[h - 1 - opt.stall_window];
      if (std::abs(old - ev.phi) <= opt.relative_change_tol * ev.phi) {
        out.diag.converged = true;
        out.diag.message = "relative objective change below tolerance";
        ++it;
        break;
      }
    }
  }
  if (it >= opt.max_iterations) out.diag.message = "iteration limit reached";
  out.diag.iterations = it;
  out.diag.phi_end = ev.phi;
  out.v = v;
  return out;
}

}  // namespace

std::vector<double> j_matrix(int K) {
  std::vector<double> J(static_cast<std::size_t>(K) * K, 0.0);
  for (int i = 0; i < K; ++i) {
    J[static_cast<std::size_t>(i) * K + i] = K - i;
    for (int j = i + 1; j < K; ++j) J[static_cast<std::size_t>(i) * K + j] = 1.0;
  }
  return J;
}

AuplCoefficients precompute_coefficients(const NoiseDensity& d, int K, int L) {
  if (!d.has_density()) {
    throw Error(ErrorKind::kNoDensity, "AUPL coefficients need a noise density");
  }
  if (K < 1 || L < 1) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("need K, L >= 1 (got {}, {})", K, L));
  }
  AuplCoefficients co;
  co.K = K;
  co.L = L;
  const auto rows = static_cast<std::size_t>(L) + 1;
  const auto cells = static_cast<std::size_t>(K);
  co.thetas.resize(rows);
  co.F.resize(rows);
  co.f.resize(rows);
  for (auto* v : {&co.q, &co.r, &co.dq, &co.dr, &co.a, &co.c}) v->assign(rows * cells, 0.0);
  const double radius = d.tail_radius();
  const double dx = 1.0 / K;

  parallel_for(rows, [&](std::size_t l) {
    const double theta = static_cast<double>(-static_cast<long>(l)) / L;
    co.thetas[l] = theta;
    co.F[l] = d.cdf(theta);
    co.f[l] = d.pdf(theta);
    double* q = co.q.data() + l * cells;
    double* r = co.r.data() + l * cells;
    double* dq = co.dq.data() + l * cells;
    double* dr = co.dr.data() + l * cells;
    const double kinks[2] = {std::min(theta, -theta), std::max(theta, -theta)};
    for (std::size_t k = 0; k < cells; ++k) {
      const double x0 = -static_cast<double>(cells - k) * dx;
      const double x1 = -static_cast<double>(cells - k - 1) * dx;
      // q, r vanish identically at theta = 0 and where xi is negligible.
      const auto dist = [&](double p) { return std::max({0.0, x0 - p, p - x1}); };
      const bool far = dist(theta) > radius && dist(-theta) > radius;
      if (l != 0 && !far) {
        const auto xi = [&](double x) { return d.pdf(x - theta) - d.pdf(x + theta); };
        q[k] = dx * integrate_piecewise(xi, x0, x1, kinks);
        r[k] = integrate_piecewise([&](double x) { return x * xi(x); }, x0, x1, kinks);
      }
      // d(xi)/d(theta) = -f'(x - theta) - f'(x + theta), integrated exactly.
      const double fm1 = d.pdf(x1 - theta), fm0 = d.pdf(x0 - theta);
      const double fp1 = d.pdf(x1 + theta), fp0 = d.pdf(x0 + theta);
      dq[k] = -dx * ((fm1 - fm0) + (fp1 - fp0));
      dr[k] = -(x1 * fm1 - x0 * fm0) + (d.cdf(x1 - theta) - d.cdf(x0 - theta)) -
              (x1 * fp1 - x0 * fp0) + (d.cdf(x1 + theta) - d.cdf(x0 + theta));
    }
    apply_j({q, cells}, {r, cells}, {co.a.data() + l * cells, cells});
    apply_j({dq, cells}, {dr, cells}, {co.c.data() + l * cells, cells});
  });
  return co;
}

double objective_term(const AuplCoefficients& co, int l, std::span<const double> m) {
  const double g = dot(co.a_row(l), m) + co.F[l];
  const double h = dot(co.c_row(l), m) + co.f[l];
  if (!(h > 0.0)) {
    throw Error(ErrorKind::kInadmissibleIterate,
                fmt::format("g'(theta_{}) = {} is not positive", l, h));
  }
  if (saturated(g)) return kInf;
  return g * (1.0 - g) / (h * h);
}

ObjectiveValue objective(const AuplCoefficients& co, std::span<const double> m) {
  if (static_cast<int>(m.size()) != co.K) {
    throw Error(ErrorKind::kInvalidParameter, "slope vector length must equal K");
  }
  std::vector<double> terms(co.L + 1);
  for (int l = 0; l <= co.L; ++l) terms[l] = objective_term(co, l, m);
  ObjectiveValue out;
  out.value = *std::max_element(terms.begin(), terms.end());
  for (int l = 0; l <= co.L; ++l) {
    if (terms[l] >= out.value - 1e-12 * std::abs(out.value)) out.active.push_back(l);
  }
  return out;
}

std::vector<double> objective_subgradient(const AuplCoefficients& co, std::span<const double> m) {
  const ObjectiveValue obj = objective(co, m);
  if (!std::isfinite(obj.value)) {
    throw Error(ErrorKind::kDegenerateProbability, "objective is infinite; no subgradient");
  }
  std::vector<double> out(co.K, 0.0);
  for (int l : obj.active) {
    const auto a = co.a_row(l);
    const auto c = co.c_row(l);
    const double g = dot(a, m) + co.F[l];
    const double h = dot(c, m) + co.f[l];
    const double wa = (1.0 - 2.0 * g) / (h * h);
    const double wc = 2.0 * g * (1.0 - g) / (h * h * h);
    for (int k = 0; k < co.K; ++k) out[k] += wa * a[k] - wc * c[k];
  }
  const double n = static_cast<double>(obj.active.size());
  for (double& x : out) x /= n;
  return out;
}

std::vector<StartingPoint> starting_points(int K) {
  if (K < 1) throw Error(ErrorKind::kInvalidParameter, "K must be positive");
  std::vector<StartingPoint> out;
  std::vector<double> step(K, 0.0);
  step[K - 1] = 0.5 * K;
  out.push_back({"threshold-like", std::move(step)});

  const auto sine = Quantizer::sine();
  std::vector<double> m(K);
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const double x0 = -static_cast<double>(K - k) / K;
    const double x1 = -static_cast<double>(K - k - 1) / K;
    m[k] = K * (sine.evaluate(x1) - sine.evaluate(x0));
    total += m[k];
  }
  for (double& x : m) x *= 0.5 * K / total;
  out.push_back({"sine-like", std::move(m)});
  return out;
}

int default_design_grid(double sigma) {
  return static_cast<int>(std::clamp(std::ceil(10.0 / sigma), 50.0, 400.0));
}

DesignResult design_with_coefficients(const AuplCoefficients& co, const DesignOptions& options) {
  const int K = co.K;
  std::vector<StartingPoint> starts = starting_points(K);
  for (const auto& s : options.extra_starts) {
    if (static_cast<int>(s.slopes.size()) != K) {
      throw Error(ErrorKind::kInvalidParameter,
                  fmt::format("start '{}' has {} slopes, expected {}", s.label, s.slopes.size(), K));
    }
    Quantizer::piecewise_linear(s.slopes);  // validates feasibility
    starts.push_back({"other", s.slopes});
  }
  if (options.random_starts > 0) {
    // Jittered copies of the sine-like start.
    const std::vector<double> base = starts[1].slopes;
    const Eigen::VectorXd base_v = nodes_from_slopes(base);
    for (int i = 0; i < options.random_starts; ++i) {
      Philox4x32 rng(options.seed, static_cast<std::uint64_t>(i));
      Eigen::VectorXd v = base_v;
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        v[j] = std::clamp(v[j] + 0.05 * (rng.uniform() - 0.5), 0.0, 1.0);
      }
      starts.push_back({"other", slopes_from_nodes(v, K)});
    }
  }

  const AffineModel md = build_model(co);
  std::vector<RunOutcome> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    runs[i] = run_sqp(md, nodes_from_slopes(starts[i].slopes), starts[i].label, options);
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].diag.feasible || !std::isfinite(runs[i].diag.phi_end)) continue;
    if (!best || runs[i].diag.phi_end < runs[*best].diag.phi_end) best = i;
  }
  DesignResult out;
  out.K = K;
  out.L = co.L;
  for (const auto& r : runs) out.runs.push_back(r.diag);
  if (!best) {
    std::string why;
    for (const auto& r : runs) why += fmt::format(" [{}: {}]", r.diag.label, r.diag.message);
    throw Error(ErrorKind::kOptimizationFailure, "no start produced a finite design:" + why);
  }
  const RunOutcome& win = runs[*best];
  out.slopes = slopes_from_nodes(win.v, K);
  out.phi = objective(co, out.slopes).value;
  out.start_label = win.diag.label;
  out.iterations = win.diag.iterations;
  out.converged = win.diag.converged;
  return out;
}

DesignResult design(const NoiseDensity& d, const DesignOptions& options) {
  if (!d.has_density()) {
    throw Error(ErrorKind::kNoDensity, "AUPL design needs a noise density");
  }
  const int K = options.K > 0 ? options.K : default_design_grid(d.sigma());
  const int L = options.L > 0 ? options.L : K;
  if (K < 10 || L < 10) {
    throw Error(ErrorKind::kInvalidParameter, fmt::format("design needs K, L >= 10 (got {}, {})", K, L));
  }
  const AuplCoefficients co = precompute_coefficients(d, K, L);
  DesignResult out = design_with_coefficients(co, options);
  out.profile = max_crb(Quantizer::piecewise_linear(out.slopes), d, L);
  return out;
}

}  // namespace qdesign
