#include "qdesign/dense_qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qdesign {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Appends d (already J' n_p) as a new column of R, rotating J so that only
// the first iq+1 entries of d are non-zero.
bool add_constraint(Eigen::MatrixXd& R, Eigen::MatrixXd& J, Eigen::VectorXd& d, int& iq,
                    double& r_norm) {
  const int n = static_cast<int>(d.size());
  for (int j = n - 1; j >= iq + 1; --j) {
    double cc = d[j - 1];
    double ss = d[j];
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    d[j] = 0.0;
    ss /= h;
    cc /= h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d[j - 1] = -h;
    } else {
      d[j - 1] = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = 0; k < n; ++k) {
      const double t1 = J(k, j - 1);
      const double t2 = J(k, j);
      J(k, j - 1) = t1 * cc + t2 * ss;
      J(k, j) = xny * (t1 + J(k, j - 1)) - t2;
    }
  }
  ++iq;
  R.col(iq - 1).head(iq) = d.head(iq);
  const double diag = std::abs(d[iq - 1]);
  if (diag <= std::numeric_limits<double>::epsilon() * r_norm) return false;
  r_norm = std::max(r_norm, diag);
  return true;
}

void delete_constraint(Eigen::MatrixXd& R, Eigen::MatrixXd& J, std::vector<int>& active,
                       Eigen::VectorXd& u, int& iq, int constraint) {
  const int n = static_cast<int>(R.rows());
  int qq = -1;
  for (int i = 0; i < iq; ++i) {
    if (active[i] == constraint) {
      qq = i;
      break;
    }
  }
  if (qq < 0) return;
  for (int i = qq; i < iq - 1; ++i) {
    active[i] = active[i + 1];
    u[i] = u[i + 1];
    R.col(i) = R.col(i + 1);
  }
  active[iq - 1] = active[iq];
  u[iq - 1] = u[iq];
  active[iq] = -1;
  u[iq] = 0.0;
  R.col(iq - 1).setZero();
  --iq;
  if (iq == 0) return;
  for (int j = qq; j < iq; ++j) {
    double cc = R(j, j);
    double ss = R(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    cc /= h;
    ss /= h;
    R(j + 1, j) = 0.0;
    if (cc < 0.0) {
      R(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      R(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < iq; ++k) {
      const double t1 = R(j, k);
      const double t2 = R(j + 1, k);
      R(j, k) = t1 * cc + t2 * ss;
      R(j + 1, k) = xny * (t1 + R(j, k)) - t2;
    }
    for (int k = 0; k < n; ++k) {
      const double t1 = J(k, j);
      const double t2 = J(k, j + 1);
      J(k, j) = t1 * cc + t2 * ss;
      J(k, j + 1) = xny * (J(k, j) + t1) - t2;
    }
  }
}

}  // namespace

QpSolution solve_qp(const QpProblem& problem, int max_iterations) {
  const int n = static_cast<int>(problem.G.rows());
  const int m = static_cast<int>(problem.CI.cols());
  QpSolution out;
  out.multipliers = Eigen::VectorXd::Zero(m);

  Eigen::LLT<Eigen::MatrixXd> chol(problem.G);
  if (chol.info() != Eigen::Success) {
    out.message = "Hessian is not positive definite";
    return out;
  }
  // J = L^{-T}, so J J' = G^{-1}.
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  chol.matrixU().solveInPlace(J);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  double r_norm = 1.0;
  const double c1 = problem.G.trace();
  const double c2 = J.trace();

  Eigen::VectorXd x = chol.solve(-problem.g0);
  double f = 0.5 * problem.g0.dot(x);

  std::vector<int> active(n + 1, -1);
  std::vector<bool> inactive(m, true);
  std::vector<bool> excluded(m, false);  // linearly dependent with the active set
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd s(m);
  Eigen::VectorXd d(n);
  Eigen::VectorXd z(n);
  Eigen::VectorXd r(n + 1);
  int iq = 0;

  for (int iter = 0;; ++iter) {
    out.iterations = iter;
    if (iter >= max_iterations) {
      out.message = "iteration limit reached";
      return out;
    }
    // Step 1: most violated inactive constraint.
    s = problem.CI.transpose() * x + problem.ci0;
    int p = -1;
    double worst = 0.0;
    double psi = 0.0;
    for (int i = 0; i < m; ++i) {
      if (!inactive[i] || excluded[i]) continue;
      psi += std::min(0.0, s[i]);
      if (s[i] < worst) {
        worst = s[i];
        p = i;
      }
    }
    if (p < 0 || std::abs(psi) <= m * std::numeric_limits<double>::epsilon() * c1 * c2 * 100.0) {
      break;
    }
    const auto np = problem.CI.col(p);
    u[iq] = 0.0;
    active[iq] = p;
    double sp = s[p];

    // Step 2: move towards satisfying constraint p.
    for (;;) {
      d.noalias() = J.transpose() * np;
      z.noalias() = J.rightCols(n - iq) * d.tail(n - iq);
      if (iq > 0) {
        r.head(iq) = R.topLeftCorner(iq, iq).triangularView<Eigen::Upper>().solve(d.head(iq));
      }
      double t1 = kInf;
      int drop = -1;
      for (int k = 0; k < iq; ++k) {
        if (r[k] > 0.0 && u[k] / r[k] < t1) {
          t1 = u[k] / r[k];
          drop = active[k];
        }
      }
      const double zn = z.dot(np);
      const double t2 = (z.squaredNorm() > std::numeric_limits<double>::epsilon()) ? -sp / zn : kInf;
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        out.message = "constraints are infeasible";
        return out;
      }
      if (!std::isfinite(t2)) {
        // Dual step only.
        u.head(iq) -= t * r.head(iq);
        u[iq] += t;
        inactive[drop] = true;
        delete_constraint(R, J, active, u, iq, drop);
        continue;
      }
      x += t * z;
      f += t * zn * (0.5 * t + u[iq]);
      u.head(iq) -= t * r.head(iq);
      u[iq] += t;
      if (t == t2) {
        if (!add_constraint(R, J, d, iq, r_norm)) {
          // Dependent on the active set; drop it from consideration.
          --iq;
          excluded[p] = true;
          u[iq + 1] = 0.0;
          active[iq + 1] = -1;
        } else {
          active[iq - 1] = p;
          inactive[p] = false;
        }
        break;
      }
      inactive[drop] = true;
      delete_constraint(R, J, active, u, iq, drop);
      sp = np.dot(x) + problem.ci0[p];
    }
  }

  out.ok = true;
  out.x = x;
  out.objective = f;
  for (int k = 0; k < iq; ++k) out.multipliers[active[k]] = u[k];
  return out;
}

}  // namespace qdesign
