#pragma once

/// @file precondition.hpp Spectral-norm estimation for the stacked constraint
/// operator and diagonal equilibration of the QP data, plus the inverse map
/// taking a scaled solution back to the original frame.

#include "nlproj/types.hpp"

namespace nlproj {

struct PowerIterParams {
  int n_iters = 100;
  double eps = 1e-12;
  std::uint64_t seed = 0;
};

/// Estimates ||[A; C]||_2 by power iteration on K'K without forming it.
/// Deterministic for a fixed seed; returns sqrt(max(rayleigh, 0)) + eps, so
/// the result is strictly positive even for empty stacks.
inline double estimate_spectral_norm(const Mat& A, const Mat& C,
                                     const PowerIterParams& params = {}) {
  require(A.rows() == 0 || C.rows() == 0 || A.cols() == C.cols(),
          "estimate_spectral_norm: column mismatch");
  const Eigen::Index n = std::max(A.cols(), C.cols());
  if (n == 0 || (A.rows() == 0 && C.rows() == 0)) return params.eps;

  Rng rng(derive_seed(params.seed, 0x5eedULL));
  Vec x = rng.normal_vec(n);
  x /= x.norm() + params.eps;
  double rayleigh = 0.0;
  for (int it = 0; it < params.n_iters; ++it) {
    Vec y = Vec::Zero(n);
    if (A.rows() > 0) y += A.transpose() * (A * x);
    if (C.rows() > 0) y += C.transpose() * (C * x);
    rayleigh = x.dot(y);
    x = y / (y.norm() + params.eps);
  }
  return std::sqrt(std::max(rayleigh, 0.0)) + params.eps;
}

/// Diagonal scaling factors produced by ruiz_equilibrate. col holds the
/// accumulated variable scaling S, row_eq and row_ineq the accumulated row
/// scalings of the two constraint blocks.
struct ScalingRecord {
  Vec col;
  Vec row_eq;
  Vec row_ineq;
};

struct RuizParams {
  int n_iters = 10;
  double eps = 1e-12;
};

/// Modified Ruiz equilibration adapted to the diagonal objective: each sweep
/// scales columns by 1/sqrt of the per-column max over |A|, |C| and |q_j|,
/// then the equality and inequality rows by 1/sqrt of their row max. The
/// quadratic diagonal picks up squared column factors, bounds divide by the
/// column factors, and infinite bounds pass through untouched.
inline ScalingRecord ruiz_equilibrate(QpData& qp, const RuizParams& params = {}) {
  qp.validate();
  const Eigen::Index n = qp.n(), m_eq = qp.n_eq(), m_ineq = qp.n_ineq();
  ScalingRecord rec;
  rec.col = Vec::Ones(n);
  rec.row_eq = Vec::Ones(m_eq);
  rec.row_ineq = Vec::Ones(m_ineq);

  for (int it = 0; it < params.n_iters; ++it) {
    Vec colmax = qp.q.cwiseAbs();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (m_eq > 0) colmax[j] = std::max(colmax[j], qp.A.col(j).cwiseAbs().maxCoeff());
      if (m_ineq > 0) colmax[j] = std::max(colmax[j], qp.C.col(j).cwiseAbs().maxCoeff());
    }
    Vec delta(n);
    for (Eigen::Index j = 0; j < n; ++j)
      delta[j] = 1.0 / std::sqrt(std::max(colmax[j], params.eps));

    qp.q = qp.q.cwiseProduct(delta.cwiseProduct(delta));
    qp.c = qp.c.cwiseProduct(delta);
    if (m_eq > 0) qp.A = qp.A * delta.asDiagonal();
    if (m_ineq > 0) qp.C = qp.C * delta.asDiagonal();
    qp.l = qp.l.cwiseQuotient(delta);
    qp.u = qp.u.cwiseQuotient(delta);
    rec.col = rec.col.cwiseProduct(delta);

    if (m_eq > 0) {
      Vec eta(m_eq);
      for (Eigen::Index i = 0; i < m_eq; ++i)
        eta[i] = 1.0 / std::sqrt(std::max(qp.A.row(i).cwiseAbs().maxCoeff(), params.eps));
      qp.A = eta.asDiagonal() * qp.A;
      qp.b = qp.b.cwiseProduct(eta);
      rec.row_eq = rec.row_eq.cwiseProduct(eta);
    }
    if (m_ineq > 0) {
      Vec zeta(m_ineq);
      for (Eigen::Index i = 0; i < m_ineq; ++i)
        zeta[i] = 1.0 / std::sqrt(std::max(qp.C.row(i).cwiseAbs().maxCoeff(), params.eps));
      qp.C = zeta.asDiagonal() * qp.C;
      qp.d = qp.d.cwiseProduct(zeta);
      rec.row_ineq = rec.row_ineq.cwiseProduct(zeta);
    }
  }
  return rec;
}

/// Maps a solution of the scaled problem back to the original variables:
/// y = S y_s, lam = R_eq lam_s, mu = R_ineq mu_s. Bound multipliers, when
/// present, divide by the column factors.
inline PrimalDualPoint unscale_solution(const PrimalDualPoint& scaled,
                                        const ScalingRecord& rec) {
  PrimalDualPoint out;
  out.y = scaled.y.cwiseProduct(rec.col);
  out.lam = scaled.lam.cwiseProduct(rec.row_eq);
  out.mu = scaled.mu.cwiseProduct(rec.row_ineq);
  if (scaled.alpha.size() > 0) out.alpha = scaled.alpha.cwiseQuotient(rec.col);
  if (scaled.beta.size() > 0) out.beta = scaled.beta.cwiseQuotient(rec.col);
  return out;
}

/// Inverse of unscale_solution, for warm starts carried into a scaled solve.
inline PrimalDualPoint scale_solution(const PrimalDualPoint& original,
                                      const ScalingRecord& rec) {
  PrimalDualPoint out;
  out.y = original.y.cwiseQuotient(rec.col);
  out.lam = original.lam.cwiseQuotient(rec.row_eq);
  out.mu = original.mu.cwiseQuotient(rec.row_ineq);
  return out;
}

}  // namespace nlproj
