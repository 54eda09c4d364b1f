#pragma once

/// @file types.hpp Problem data and solution containers shared by the solver,
/// projection, and oracle layers.

#include "nlproj/core.hpp"

namespace nlproj {

/// Box-constrained QP with diagonal quadratic term,
///
///   min 0.5 y'diag(q)y + c'y   s.t.  A y = b,  C y <= d,  l <= y <= u.
///
/// Empty constraint blocks are 0 x n matrices. Bounds may hold +/-kInf.
struct QpData {
  Vec q;  ///< diagonal of the quadratic term, elementwise >= 0
  Vec c;
  Mat A;
  Vec b;
  Mat C;
  Vec d;
  Vec l;
  Vec u;

  Eigen::Index n() const { return q.size(); }
  Eigen::Index n_eq() const { return A.rows(); }
  Eigen::Index n_ineq() const { return C.rows(); }

  double objective(const Vec& y) const {
    return 0.5 * y.dot(q.cwiseProduct(y)) + c.dot(y);
  }

  /// Dimension and sign checks. Throws on violation.
  void validate() const {
    const Eigen::Index nv = n();
    require(c.size() == nv, "QpData: c size mismatch");
    require(A.cols() == nv || A.rows() == 0, "QpData: A cols mismatch");
    require(b.size() == A.rows(), "QpData: b size mismatch");
    require(C.cols() == nv || C.rows() == 0, "QpData: C cols mismatch");
    require(d.size() == C.rows(), "QpData: d size mismatch");
    require(l.size() == nv && u.size() == nv, "QpData: bound size mismatch");
    for (Eigen::Index i = 0; i < nv; ++i) {
      if (!(q[i] >= 0.0)) throw DimensionError("QpData: negative q entry");
      if (!(l[i] <= u[i])) throw DimensionError("QpData: crossed bounds");
    }
  }
};

/// Primal-dual iterate. lam pairs with equality rows, mu with inequality
/// rows (mu >= 0 at a solution). alpha/beta are the recovered bound
/// multipliers; empty until recover_bound_multipliers fills them.
struct PrimalDualPoint {
  Vec y;
  Vec lam;
  Vec mu;
  Vec alpha;
  Vec beta;

  static PrimalDualPoint Zero(Eigen::Index n, Eigen::Index m_eq, Eigen::Index m_ineq) {
    PrimalDualPoint p;
    p.y = Vec::Zero(n);
    p.lam = Vec::Zero(m_eq);
    p.mu = Vec::Zero(m_ineq);
    return p;
  }

  /// Stacked (y, lam, mu); the vector the learned backbone predicts.
  Vec stacked() const {
    Vec z(y.size() + lam.size() + mu.size());
    z << y, lam, mu;
    return z;
  }

  static PrimalDualPoint from_stacked(const Vec& z, Eigen::Index n, Eigen::Index m_eq,
                                      Eigen::Index m_ineq) {
    require(z.size() == n + m_eq + m_ineq, "from_stacked: size mismatch");
    PrimalDualPoint p;
    p.y = z.head(n);
    p.lam = z.segment(n, m_eq);
    p.mu = z.tail(m_ineq);
    return p;
  }
};

/// One evaluation of a parametric family at (x, y): objective data, both
/// constraint blocks with Jacobians, and the active box.
struct EvalRecord {
  double f = 0.0;
  Vec grad_f;
  Vec hess_diag;
  Vec h;
  Mat jac_h;
  Vec g;
  Mat jac_g;
  Vec lower;
  Vec upper;
  bool x_in_box = true;  ///< parameter landed inside the declared box
};

/// Max-norm of the positive part, 0 for empty input.
inline double pos_part_inf_norm(const Vec& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, v[i]);
  return std::max(m, 0.0);
}

/// Largest original-constraint violation of y for a record evaluated at y.
inline double max_violation(const EvalRecord& rec) {
  double v = 0.0;
  if (rec.h.size() > 0) v = rec.h.cwiseAbs().maxCoeff();
  return std::max(v, pos_part_inf_norm(rec.g));
}

}  // namespace nlproj
