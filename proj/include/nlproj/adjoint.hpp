#pragma once

/// @file adjoint.hpp Differentiation through the layered projection without
/// unrolling: each layer's solution is a fixed point of one plain primal-dual
/// iteration F, so cotangents satisfy (I - J_F') v = g and parameter
/// gradients follow as v' dF/dw. The linear solve is matrix-free BiCGStab;
/// layer composition is reverse-mode over the recorded linearization points.

#include "nlproj/cp_solver.hpp"
#include "nlproj/projection.hpp"

#include <vector>

namespace nlproj {

struct AdjointParams {
  int max_iters = 500;
  double tol = 1e-10;
  double tikhonov = 1e-8;  ///< diagonal shift for the fallback solve
};

/// Cotangents of one layer's QP data, as produced by the reverse pass
/// through a single iteration of the solver map.
struct QpCotangents {
  Vec q_bar, c_bar;
  Mat A_bar;
  Vec b_bar;
  Mat C_bar;
  Vec d_bar;
  Vec l_bar, u_bar;
};

/// One plain solver iteration F (theta = 1, extrapolation collapsed,
/// step sizes frozen) linearized at a converged point. Subgradient choices
/// at ties: the positive-part derivative is 0 at 0 and the box-clamp
/// derivative is the strict-interior indicator.
class FixedPointMap {
 public:
  FixedPointMap(const QpData& qp, double tau, double sigma, const PrimalDualPoint& z_star)
      : qp_(qp), tau_(tau), sigma_(sigma) {
    P_ = (1.0 + tau_ * qp.q.array()).inverse().matrix();
    y_ = z_star.y;
    lam_plus_ = z_star.lam;
    if (qp.n_eq() > 0) lam_plus_ += sigma_ * (qp.A * y_ - qp.b);
    if (qp.n_ineq() > 0) {
      m_pre_ = z_star.mu + sigma_ * (qp.C * y_ - qp.d);
      mu_plus_ = m_pre_.cwiseMax(0.0);
      dmu_mask_ = (m_pre_.array() > 0.0).cast<double>().matrix();
    } else {
      m_pre_ = mu_plus_ = dmu_mask_ = Vec(0);
    }
    Vec s = y_ - tau_ * qp.c;
    if (qp.n_eq() > 0) s.noalias() -= tau_ * (qp.A.transpose() * lam_plus_);
    if (qp.n_ineq() > 0) s.noalias() -= tau_ * (qp.C.transpose() * mu_plus_);
    nu_ = P_.cwiseProduct(s);
    dy_mask_ = Vec(qp.n());
    for (Eigen::Index i = 0; i < qp.n(); ++i)
      dy_mask_[i] = (nu_[i] > qp.l[i] && nu_[i] < qp.u[i]) ? 1.0 : 0.0;
  }

  Eigen::Index dim() const { return qp_.n() + qp_.n_eq() + qp_.n_ineq(); }
  double tau() const { return tau_; }
  double sigma() const { return sigma_; }

  /// F(z) - z for an arbitrary point, stacked.
  static Vec residual(const QpData& qp, double tau, double sigma,
                      const PrimalDualPoint& z) {
    const CpState next = cp_step(CpState::from_point(z), qp, tau, sigma, 1.0);
    Vec r(z.y.size() + z.lam.size() + z.mu.size());
    r << next.y - z.y, next.lam - z.lam, next.mu - z.mu;
    return r;
  }

  /// Transposed Jacobian product J_F' v on stacked vectors.
  Vec apply_transposed(const Vec& v) const {
    const Eigen::Index n = qp_.n(), me = qp_.n_eq(), mi = qp_.n_ineq();
    require(v.size() == n + me + mi, "FixedPointMap: cotangent size mismatch");
    const Vec v_y = v.head(n), v_lam = v.segment(n, me), v_mu = v.tail(mi);

    const Vec s_bar = P_.cwiseProduct(dy_mask_.cwiseProduct(v_y));
    Vec lam_t = v_lam;
    if (me > 0) lam_t.noalias() -= tau_ * (qp_.A * s_bar);
    Vec mu_t(mi);
    if (mi > 0) mu_t = dmu_mask_.cwiseProduct(v_mu - tau_ * (qp_.C * s_bar));

    Vec out_y = s_bar;
    if (me > 0) out_y.noalias() += sigma_ * (qp_.A.transpose() * lam_t);
    if (mi > 0) out_y.noalias() += sigma_ * (qp_.C.transpose() * mu_t);

    Vec out(n + me + mi);
    out << out_y, lam_t, mu_t;
    return out;
  }

  /// Forward Jacobian product J_F v, used by the dense cross-checks.
  Vec apply(const Vec& v) const {
    const Eigen::Index n = qp_.n(), me = qp_.n_eq(), mi = qp_.n_ineq();
    require(v.size() == n + me + mi, "FixedPointMap: tangent size mismatch");
    const Vec dy = v.head(n), dlam = v.segment(n, me), dmu = v.tail(mi);

    Vec dlam_p = dlam;
    if (me > 0) dlam_p.noalias() += sigma_ * (qp_.A * dy);
    Vec dmu_p(mi);
    if (mi > 0) dmu_p = dmu_mask_.cwiseProduct(dmu + sigma_ * (qp_.C * dy));

    Vec ds = dy;
    if (me > 0) ds.noalias() -= tau_ * (qp_.A.transpose() * dlam_p);
    if (mi > 0) ds.noalias() -= tau_ * (qp_.C.transpose() * dmu_p);
    const Vec dy_p = dy_mask_.cwiseProduct(P_.cwiseProduct(ds));

    Vec out(n + me + mi);
    out << dy_p, dlam_p, dmu_p;
    return out;
  }

  /// v' dF/dw for the adjoint vector v: cotangents of every data field of
  /// the layer QP, including the prox diagonal's dependence on q.
  QpCotangents parameter_cotangents(const Vec& v) const {
    const Eigen::Index n = qp_.n(), me = qp_.n_eq(), mi = qp_.n_ineq();
    const Vec v_y = v.head(n), v_lam = v.segment(n, me), v_mu = v.tail(mi);

    const Vec nu_bar = dy_mask_.cwiseProduct(v_y);
    const Vec s_bar = P_.cwiseProduct(nu_bar);

    QpCotangents ct;
    ct.q_bar = -tau_ * s_bar.cwiseProduct(nu_);
    ct.c_bar = -tau_ * s_bar;
    ct.l_bar = Vec::Zero(n);
    ct.u_bar = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (nu_[i] <= qp_.l[i]) ct.l_bar[i] = v_y[i];
      if (nu_[i] >= qp_.u[i]) ct.u_bar[i] = v_y[i];
    }

    Vec lam_t = v_lam;
    if (me > 0) lam_t.noalias() -= tau_ * (qp_.A * s_bar);
    ct.b_bar = -sigma_ * lam_t;
    ct.A_bar = Mat::Zero(me, n);
    if (me > 0) {
      ct.A_bar.noalias() += sigma_ * lam_t * y_.transpose();
      ct.A_bar.noalias() -= tau_ * lam_plus_ * s_bar.transpose();
    }

    Vec mu_t(mi);
    if (mi > 0) mu_t = dmu_mask_.cwiseProduct(v_mu - tau_ * (qp_.C * s_bar));
    ct.d_bar = mi > 0 ? Vec(-sigma_ * mu_t) : Vec(0);
    ct.C_bar = Mat::Zero(mi, n);
    if (mi > 0) {
      ct.C_bar.noalias() += sigma_ * mu_t * y_.transpose();
      ct.C_bar.noalias() -= tau_ * mu_plus_ * s_bar.transpose();
    }
    return ct;
  }

 private:
  const QpData& qp_;
  double tau_, sigma_;
  Vec P_;
  Vec y_, lam_plus_, mu_plus_, m_pre_, nu_;
  Vec dy_mask_, dmu_mask_;
};

/// Stacked F(z) - z at the solver's own step sizes for the problem.
inline Vec fixed_point_residual(const QpData& qp, const PrimalDualPoint& z,
                                const CpParams& params = {}) {
  const double norm_K = estimate_spectral_norm(qp.A, qp.C, params.power);
  const double L_f = qp.n() > 0 ? qp.q.maxCoeff() : 0.0;
  double tau = params.tau, sigma = params.sigma;
  if (tau <= 0.0 || sigma <= 0.0) choose_step_sizes(L_f, norm_K, tau, sigma);
  return FixedPointMap::residual(qp, tau, sigma, z);
}

namespace detail {

/// Unpreconditioned BiCGStab on x -> x - J'x. Returns true on convergence.
template <typename Op>
inline bool bicgstab(const Op& op, const Vec& rhs, Vec& x, int max_iters, double tol) {
  const double target = tol * std::max(1.0, rhs.norm());
  x = Vec::Zero(rhs.size());
  Vec r = rhs;  // r = rhs - op(0)
  if (r.norm() <= target) return true;
  const Vec r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Vec v = Vec::Zero(rhs.size()), p = Vec::Zero(rhs.size());
  for (int it = 0; it < max_iters; ++it) {
    const double rho_new = r0.dot(r);
    if (std::abs(rho_new) < 1e-300) return false;  // breakdown
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    rho = rho_new;
    v = op(p);
    const double r0v = r0.dot(v);
    if (std::abs(r0v) < 1e-300) return false;
    alpha = rho / r0v;
    const Vec s = r - alpha * v;
    if (s.norm() <= target) {
      x += alpha * p;
      return true;
    }
    const Vec t = op(s);
    const double tt = t.squaredNorm();
    if (tt < 1e-300) return false;
    omega = t.dot(s) / tt;
    x += alpha * p + omega * s;
    r = s - omega * t;
    if (r.norm() <= target) return true;
    if (std::abs(omega) < 1e-300) return false;
  }
  return false;
}

}  // namespace detail

/// Solves (I - J_F') v = g matrix-free. Falls back to a Tikhonov-shifted
/// system when plain BiCGStab stalls; throws AdjointError if both fail.
inline Vec adjoint_solve(const FixedPointMap& map, const Vec& g,
                         const AdjointParams& params = {}) {
  require(g.size() == map.dim(), "adjoint_solve: cotangent size mismatch");
  Vec v;
  const auto plain = [&](const Vec& w) { return Vec(w - map.apply_transposed(w)); };
  if (detail::bicgstab(plain, g, v, params.max_iters, params.tol)) return v;
  const double eta = params.tikhonov;
  const auto shifted = [&](const Vec& w) {
    return Vec((1.0 + eta) * w - map.apply_transposed(w));
  };
  if (detail::bicgstab(shifted, g, v, params.max_iters, params.tol)) return v;
  throw AdjointError("adjoint_solve: BiCGStab failed, shifted system also stalled");
}

/// Pulls a layer-QP cotangent back to the linearization point through the
/// model-building map: the floored diagonal, the matched linear term, and
/// the constraint linearizations. Equality blocks are affine in y for every
/// built-in family, so A_bar and b_bar contribute nothing here.
inline Vec subproblem_cotangent_to_y(const ParametricNlpFamily& fam, const Vec& x,
                                     const Vec& y_lin, double rho,
                                     const QpCotangents& ct) {
  const Vec hess = fam.hess_diag(x, y_lin);
  const Vec third = fam.third_diag(x, y_lin);
  const Vec q = (rho * hess.array()).max(kCurvatureFloor).matrix();
  Vec mask(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i)
    mask[i] = rho * hess[i] > kCurvatureFloor ? 1.0 : 0.0;
  const Vec dq_dy = rho * mask.cwiseProduct(third);

  Vec y_bar = dq_dy.cwiseProduct(ct.q_bar);
  y_bar += fam.hess_f_vec(x, y_lin, ct.c_bar);
  y_bar -= q.cwiseProduct(ct.c_bar);
  y_bar -= dq_dy.cwiseProduct(y_lin).cwiseProduct(ct.c_bar);
  for (int i = 0; i < fam.n_ineq; ++i) {
    const Vec u = ct.C_bar.row(i).transpose() + ct.d_bar[i] * y_lin;
    if (u.isZero(0.0)) continue;
    y_bar += fam.g_hess_vec(x, y_lin, i, u);
  }
  return y_bar;
}

namespace detail {

/// Resolves the step sizes the solver would use on this layer QP.
inline std::pair<double, double> layer_steps(const QpData& qp, const CpParams& params) {
  double tau = params.tau, sigma = params.sigma;
  if (tau <= 0.0 || sigma <= 0.0) {
    const double norm_K = estimate_spectral_norm(qp.A, qp.C, params.power);
    const double L_f = qp.n() > 0 ? qp.q.maxCoeff() : 0.0;
    choose_step_sizes(L_f, norm_K, tau, sigma);
  }
  return {tau, sigma};
}

/// Backward through one layer: cotangent on the layer output becomes a
/// cotangent on the linearization point (stacked, dual blocks zero).
inline Vec layer_backward(const ParametricNlpFamily& fam, const Vec& x, const Vec& y_lin,
                          const PrimalDualPoint& z_out, const Vec& g,
                          const ProjectionConfig& cfg, const AdjointParams& adj) {
  const QpData qp = build_subproblem(fam, x, y_lin, cfg.rho);
  const auto [tau, sigma] = layer_steps(qp, cfg.cp);
  const FixedPointMap map(qp, tau, sigma, z_out);
  const Vec v = adjoint_solve(map, g, adj);
  const QpCotangents ct = map.parameter_cotangents(v);
  const Vec y_bar = subproblem_cotangent_to_y(fam, x, y_lin, cfg.rho, ct);
  Vec out = Vec::Zero(g.size());
  out.head(y_bar.size()) = y_bar;
  return out;
}

}  // namespace detail

/// Vector-Jacobian product of the k-layer projection: pulls the cotangent
/// g_z on the projected point back to the prediction. Dual blocks of the
/// returned cotangent are zero because the layer maps depend on the incoming
/// point only through its primal part (warm starts do not affect the fixed
/// points). When last_layer_only is set, only the final layer is
/// differentiated, the standard truncation ablation.
inline Vec vjp_projection(const ParametricNlpFamily& fam, const Vec& x,
                          const PrimalDualPoint& z_hat, const ProjectionResult& forward,
                          const Vec& g_z, const ProjectionConfig& cfg,
                          const AdjointParams& adj = {}, bool last_layer_only = false) {
  const auto& layers = forward.z_layers;
  require(!layers.empty(), "vjp_projection: forward pass recorded no layers");
  Vec g = g_z;
  const int first = last_layer_only ? static_cast<int>(layers.size()) - 1 : 0;
  for (int i = static_cast<int>(layers.size()) - 1; i >= first; --i) {
    const Vec& y_lin = i == 0 ? z_hat.y : layers[static_cast<size_t>(i) - 1].y;
    g = detail::layer_backward(fam, x, y_lin, layers[static_cast<size_t>(i)], g, cfg, adj);
  }
  return g;
}

/// Convenience overload matching the forward signature: re-runs project_k
/// internally to recover the layer fixed points, then applies the reverse
/// pass. z_tilde is accepted for interface symmetry and cross-checked
/// against the recomputed forward pass.
inline Vec vjp_projection(const ParametricNlpFamily& fam, const Vec& x,
                          const PrimalDualPoint& z_hat, const PrimalDualPoint& z_tilde,
                          const Vec& g_z, const ProjectionConfig& cfg,
                          const AdjointParams& adj = {}, bool last_layer_only = false) {
  const ProjectionResult forward = project_k(fam, x, z_hat, cfg);
  require(forward.point.y.size() == z_tilde.y.size(), "vjp_projection: size mismatch");
  return vjp_projection(fam, x, z_hat, forward, g_z, cfg, adj, last_layer_only);
}

}  // namespace nlproj
