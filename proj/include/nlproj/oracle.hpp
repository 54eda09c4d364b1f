#pragma once

/// @file oracle.hpp Reference solvers, deliberately on a different route from
/// the production path: dense KKT factorizations and exhaustive active-set
/// enumeration instead of first-order iterations. Exact (to factorization
/// accuracy) at desk scale; cost grows combinatorially and is budgeted.

#include "nlproj/family.hpp"
#include "nlproj/types.hpp"

#include <vector>

namespace nlproj {

/// Equality-constrained QP via one dense symmetric-indefinite KKT solve:
///   [Q A'; A 0] [y; lam] = [-c; b].
/// Q may be dense. Throws SingularKktError when the system is rank
/// deficient beyond 1e-10 relative residual.
inline std::pair<Vec, Vec> solve_eq_qp_kkt(const Mat& Q, const Vec& c, const Mat& A,
                                           const Vec& b) {
  const Eigen::Index n = Q.rows(), m = A.rows();
  require(Q.cols() == n && c.size() == n, "solve_eq_qp_kkt: Q/c mismatch");
  require(A.cols() == n || m == 0, "solve_eq_qp_kkt: A cols mismatch");
  require(b.size() == m, "solve_eq_qp_kkt: b size mismatch");

  Mat K = Mat::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = Q;
  if (m > 0) {
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
  }
  Vec rhs(n + m);
  rhs.head(n) = -c;
  rhs.tail(m) = b;

  Eigen::FullPivLU<Mat> lu(K);
  if (lu.rank() < n + m) throw SingularKktError("solve_eq_qp_kkt: singular KKT matrix");
  const Vec sol = lu.solve(rhs);
  const double scale = std::max({1.0, rhs.cwiseAbs().maxCoeff(),
                                 K.cwiseAbs().maxCoeff() * sol.cwiseAbs().maxCoeff()});
  if ((K * sol - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw SingularKktError("solve_eq_qp_kkt: KKT residual too large");
  return {sol.head(n), sol.tail(m)};
}

/// Dense-objective QP for the oracle route. QpData converts losslessly; the
/// sequential reference also builds these with full Hessians.
struct DenseQp {
  Mat Q;
  Vec c;
  Mat A;
  Vec b;
  Mat C;
  Vec d;
  Vec l, u;

  static DenseQp from(const QpData& qp) {
    return DenseQp{Mat(qp.q.asDiagonal()), qp.c, qp.A, qp.b, qp.C, qp.d, qp.l, qp.u};
  }

  double objective(const Vec& y) const { return 0.5 * y.dot(Q * y) + c.dot(y); }
};

struct ActiveSetResult {
  PrimalDualPoint point;  ///< alpha/beta populated from active bound rows
  double objective = 0.0;
  int kkt_solves = 0;
  std::vector<int> active;  ///< candidate-row indices of the certified pattern
};

struct ActiveSetOptions {
  double feas_tol = 1e-9;
  double dual_tol = 1e-9;
  long budget = 500000;  ///< max KKT factorizations before TooLargeError
};

/// Globally solves a strictly convex QP by enumerating activity patterns in
/// ascending cardinality; the first KKT-consistent pattern is optimal.
/// Finite bounds are folded in as inequality rows. Exact at small scale;
/// throws TooLargeError once the budget is spent.
inline ActiveSetResult solve_qp_active_set(const DenseQp& qp,
                                           const ActiveSetOptions& opts = {}) {
  const Eigen::Index n = qp.Q.rows(), m_eq = qp.A.rows(), m_in = qp.C.rows();

  // Candidate rows: C first, then finite lower bounds (-y_i <= -l_i), then
  // finite upper bounds (y_i <= u_i).
  struct Row {
    int kind;  // 0 = C row, 1 = lower bound, 2 = upper bound
    int index;
  };
  std::vector<Row> cand;
  for (int i = 0; i < m_in; ++i) cand.push_back({0, i});
  for (int i = 0; i < n; ++i)
    if (std::isfinite(qp.l[i])) cand.push_back({1, i});
  for (int i = 0; i < n; ++i)
    if (std::isfinite(qp.u[i])) cand.push_back({2, i});
  const int m_tot = static_cast<int>(cand.size());

  const auto row_of = [&](const Row& r) -> Vec {
    if (r.kind == 0) return qp.C.row(r.index).transpose();
    Vec e = Vec::Zero(n);
    e[r.index] = r.kind == 1 ? -1.0 : 1.0;
    return e;
  };
  const auto rhs_of = [&](const Row& r) {
    if (r.kind == 0) return qp.d[r.index];
    return r.kind == 1 ? -qp.l[r.index] : qp.u[r.index];
  };

  long solves = 0;
  const int max_card =
      static_cast<int>(std::max<Eigen::Index>(0, std::min<Eigen::Index>(m_tot, n - m_eq)));
  std::vector<int> idx;

  const auto try_pattern = [&](const std::vector<int>& sel) -> std::optional<ActiveSetResult> {
    // Both bounds of one variable cannot be simultaneously active.
    for (size_t a = 0; a + 1 < sel.size(); ++a)
      for (size_t b2 = a + 1; b2 < sel.size(); ++b2) {
        const Row &ra = cand[sel[a]], &rb = cand[sel[b2]];
        if (ra.kind != 0 && rb.kind != 0 && ra.index == rb.index) return std::nullopt;
      }

    const int k = static_cast<int>(sel.size());
    Mat A_act(m_eq + k, n);
    Vec b_act(m_eq + k);
    A_act.topRows(m_eq) = qp.A;
    b_act.head(m_eq) = qp.b;
    for (int j = 0; j < k; ++j) {
      A_act.row(m_eq + j) = row_of(cand[sel[j]]).transpose();
      b_act[m_eq + j] = rhs_of(cand[sel[j]]);
    }

    ++solves;
    Vec y, lam_all;
    try {
      std::tie(y, lam_all) = solve_eq_qp_kkt(qp.Q, qp.c, A_act, b_act);
    } catch (const SingularKktError&) {
      return std::nullopt;
    }

    // Dual feasibility of the selected rows.
    for (int j = 0; j < k; ++j)
      if (lam_all[m_eq + j] < -opts.dual_tol) return std::nullopt;

    // Primal feasibility of everything not selected.
    std::vector<char> selected(m_tot, 0);
    for (int s : sel) selected[s] = 1;
    for (int i2 = 0; i2 < m_tot; ++i2) {
      if (selected[i2]) continue;
      if (row_of(cand[i2]).dot(y) > rhs_of(cand[i2]) + opts.feas_tol) return std::nullopt;
    }

    ActiveSetResult res;
    res.point.y = y;
    res.point.lam = lam_all.head(m_eq);
    res.point.mu = Vec::Zero(m_in);
    res.point.alpha = Vec::Zero(n);
    res.point.beta = Vec::Zero(n);
    for (int j = 0; j < k; ++j) {
      const double m = std::max(0.0, lam_all[m_eq + j]);
      const Row& r = cand[sel[j]];
      if (r.kind == 0)
        res.point.mu[r.index] = m;
      else if (r.kind == 1)
        res.point.alpha[r.index] = m;
      else
        res.point.beta[r.index] = m;
    }
    res.objective = qp.objective(y);
    res.active = sel;
    return res;
  };

  for (int card = 0; card <= max_card; ++card) {
    // Lexicographic combinations of the candidate rows at this cardinality.
    idx.resize(card);
    for (int j = 0; j < card; ++j) idx[j] = j;
    while (true) {
      if (solves > opts.budget)
        throw TooLargeError("solve_qp_active_set: enumeration budget exhausted");
      if (auto res = try_pattern(idx)) {
        res->kkt_solves = static_cast<int>(solves);
        return *res;
      }
      if (card == 0) break;
      int j = card - 1;
      while (j >= 0 && idx[j] == m_tot - card + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int t = j + 1; t < card; ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  throw InfeasibleError("solve_qp_active_set: no KKT-consistent pattern found");
}

inline ActiveSetResult solve_qp_active_set(const QpData& qp,
                                           const ActiveSetOptions& opts = {}) {
  return solve_qp_active_set(DenseQp::from(qp), opts);
}

struct NlpReferenceResult {
  PrimalDualPoint point;
  double objective = 0.0;
  int outer_iters = 0;
  bool converged = false;
  bool stationary_only = false;  ///< nonconvex family: KKT point, no global claim
};

struct NlpReferenceOptions {
  double tol = 1e-9;
  int max_outer = 100;
  double step_cap = 2.0;  ///< max-norm trust cap on each outer step
  ActiveSetOptions active_set;
};

namespace detail {

/// Full objective Hessian assembled column by column from the family's
/// Hessian-vector product, eigenvalue-floored for the nonconvex kind.
inline Mat reference_hessian(const ParametricNlpFamily& fam, const Vec& x, const Vec& y) {
  const int n = fam.n_vars;
  Mat H(n, n);
  Vec e = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    H.col(j) = fam.hess_f_vec(x, y, e);
    e[j] = 0.0;
  }
  H = 0.5 * (H + H.transpose());
  if (fam.kind == FamilyKind::kNonconvex) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Vec vals = es.eigenvalues().cwiseMax(1e-6);
    H = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  }
  return H;
}

}  // namespace detail

/// Sequential reference solver: full-Hessian QP subproblems with linearized
/// constraints, each solved exactly by active-set enumeration, iterated until
/// the original violation and the step both drop below tol. For an affine
/// family with quadratic objective the first subproblem is the problem
/// itself, so it terminates in one outer iteration.
inline NlpReferenceResult solve_nlp_reference(const ParametricNlpFamily& fam, const Vec& x,
                                              const NlpReferenceOptions& opts = {}) {
  Vec y;
  if (auto w = fam.feasible_point(x))
    y = *w;
  else
    y = Vec::Zero(fam.n_vars);

  NlpReferenceResult out;
  out.stationary_only = fam.kind == FamilyKind::kNonconvex;

  ActiveSetResult as;
  for (int it = 0; it < opts.max_outer; ++it) {
    const EvalRecord rec = fam.evaluate(x, y);
    DenseQp sub;
    sub.Q = detail::reference_hessian(fam, x, y);
    sub.c = rec.grad_f - sub.Q * y;
    sub.A = rec.jac_h;
    sub.b = rec.jac_h * y - rec.h;
    sub.C = rec.jac_g;
    sub.d = rec.jac_g * y - rec.g;
    sub.l = rec.lower;
    sub.u = rec.upper;

    as = solve_qp_active_set(sub, opts.active_set);
    Vec step = as.point.y - y;
    const double step_norm = step.size() > 0 ? step.cwiseAbs().maxCoeff() : 0.0;
    if (step_norm > opts.step_cap) step *= opts.step_cap / step_norm;
    y += step;

    out.outer_iters = it + 1;
    const EvalRecord after = fam.evaluate(x, y);
    if (max_violation(after) <= opts.tol && step_norm <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
    throw NoProgressError("solve_nlp_reference: no convergence within outer budget");

  out.point = as.point;
  out.point.y = y;
  out.objective = fam.f(x, y);
  return out;
}

}  // namespace nlproj
