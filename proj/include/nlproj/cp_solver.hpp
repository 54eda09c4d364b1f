#pragma once

/// @file cp_solver.hpp Inversion-free primal-dual solver for box/equality/
/// inequality constrained QPs with diagonal quadratic term. The y-update is a
/// diagonal prox (no factorization anywhere), duals ascend on the residuals,
/// and termination is by primal residual plus primal-dual gap. A strongly
/// convex diagonal enables the accelerated step-size schedule.

#include "nlproj/precondition.hpp"
#include "nlproj/types.hpp"

namespace nlproj {

struct CpParams {
  double tau = 0.0;    ///< primal step; <= 0 derives both steps from the data
  double sigma = 0.0;  ///< dual step
  double theta = 1.0;  ///< extrapolation weight
  int max_iters = 200000;
  int check_every = 25;  ///< residual cadence, in iterations
  double eps_prim = 1e-8;
  double eps_gap = 1e-8;
  PowerIterParams power;  ///< spectral-norm estimation for the step-size rule
};

/// Step sizes for a given curvature bound L_f = max_i q_i and operator norm.
/// Small curvature takes the symmetric 0.9/||K|| pair; otherwise tau backs
/// off to 1/(L_f + ||K||) and sigma fills the product to 0.99.
inline void choose_step_sizes(double L_f, double norm_K, double& tau, double& sigma) {
  if (L_f * 0.9 / norm_K < 0.1 * norm_K) {
    tau = sigma = 0.9 / norm_K;
  } else {
    tau = 1.0 / (L_f + norm_K);
    sigma = 0.99 / (tau * norm_K * norm_K);
  }
}

/// Admissibility predicate (1/tau - L_f)(1/sigma) < ||K||^2, reported on the
/// solve report. Purely diagnostic: the inequality as stated excludes the
/// classical small-step region (it fails for L_f -> 0 under any convergent
/// choice), so it is recorded rather than enforced.
inline bool step_condition_holds(double tau, double sigma, double L_f, double norm_K) {
  return (1.0 / tau - L_f) * (1.0 / sigma) < norm_K * norm_K;
}

/// Residuals of a primal-dual point. dual_inf is NaN unless bound
/// multipliers were supplied; the bound terms of the gap vanish identically
/// for box-feasible iterates and are omitted.
struct Residuals {
  double prim_inf = 0.0;  ///< max-norm of [Ay - b; max(Cy - d, 0)]
  double gap = 0.0;       ///< |lam'(Ay - b) + mu'(Cy - d)|
  double dual_inf = std::numeric_limits<double>::quiet_NaN();
};

inline Residuals residuals(const QpData& qp, const PrimalDualPoint& pt) {
  Residuals r;
  double gap = 0.0;
  if (qp.n_eq() > 0) {
    const Vec rh = qp.A * pt.y - qp.b;
    r.prim_inf = rh.cwiseAbs().maxCoeff();
    gap += pt.lam.dot(rh);
  }
  if (qp.n_ineq() > 0) {
    const Vec rg = qp.C * pt.y - qp.d;
    r.prim_inf = std::max(r.prim_inf, pos_part_inf_norm(rg));
    gap += pt.mu.dot(rg);
  }
  r.gap = std::abs(gap);
  if (pt.alpha.size() == qp.n() && pt.beta.size() == qp.n()) {
    Vec s = qp.q.cwiseProduct(pt.y) + qp.c - pt.alpha + pt.beta;
    if (qp.n_eq() > 0) s += qp.A.transpose() * pt.lam;
    if (qp.n_ineq() > 0) s += qp.C.transpose() * pt.mu;
    r.dual_inf = s.size() > 0 ? s.cwiseAbs().maxCoeff() : 0.0;
  }
  return r;
}

/// Iterate of the primal-dual loop: primal point, extrapolated point, and
/// the two dual blocks.
struct CpState {
  Vec y;
  Vec y_bar;
  Vec lam;
  Vec mu;

  static CpState from_point(const PrimalDualPoint& p) {
    return CpState{p.y, p.y, p.lam, p.mu};
  }
};

namespace detail {

/// One-iteration kernel with the prox scaling P = 1/(1 + tau q) held as
/// state. All updates write in place; cp_step wraps this for one-shot use.
struct CpKernel {
  const QpData& qp;
  double tau, sigma, theta;
  Vec P;

  CpKernel(const QpData& qp_in, double tau_in, double sigma_in, double theta_in)
      : qp(qp_in), tau(tau_in), sigma(sigma_in), theta(theta_in) {
    rebuild_prox();
  }

  void rebuild_prox() {
    P = (1.0 + tau * qp.q.array()).inverse().matrix();
  }

  void step(CpState& st) const {
    // dual ascent at the extrapolated point
    if (qp.n_eq() > 0) st.lam.noalias() += sigma * (qp.A * st.y_bar - qp.b);
    if (qp.n_ineq() > 0)
      st.mu = (st.mu + sigma * (qp.C * st.y_bar - qp.d)).cwiseMax(0.0);

    // prox step on the primal, then box clamp
    Vec s = st.y - tau * qp.c;
    if (qp.n_eq() > 0) s.noalias() -= tau * (qp.A.transpose() * st.lam);
    if (qp.n_ineq() > 0) s.noalias() -= tau * (qp.C.transpose() * st.mu);
    const Vec nu = P.cwiseProduct(s);
    const Vec y_new = nu.cwiseMax(qp.l).cwiseMin(qp.u);

    st.y_bar = y_new + theta * (y_new - st.y);
    st.y = y_new;
  }
};

}  // namespace detail

/// One primal-dual iteration. States are value types; the returned state
/// holds (y+, y_bar+, lam+, mu+).
inline CpState cp_step(const CpState& state, const QpData& qp, double tau, double sigma,
                       double theta = 1.0) {
  detail::CpKernel kernel(qp, tau, sigma, theta);
  CpState next = state;
  kernel.step(next);
  return next;
}

struct SolveReport {
  PrimalDualPoint point;
  bool converged = false;
  int iters = 0;
  Residuals final_residuals;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double norm_K = 0.0;
  double tau = 0.0;    ///< initial primal step actually used
  double sigma = 0.0;  ///< initial dual step actually used
  double gamma = 0.0;  ///< strong-convexity modulus driving acceleration
  bool step_condition_ok = false;
  bool used_scaling = false;
};

namespace detail {

/// Hook deciding where termination residuals are measured. The scaled solve
/// points this at the original data so the tolerance means the same thing
/// with and without equilibration.
struct TerminationRef {
  const QpData* orig = nullptr;
  const ScalingRecord* scaling = nullptr;
};

inline SolveReport solve_qp_impl(const QpData& qp, const PrimalDualPoint& init,
                                 const CpParams& params, bool accelerate,
                                 const TerminationRef& ref = {}) {
  qp.validate();
  require(init.y.size() == qp.n() && init.lam.size() == qp.n_eq() &&
              init.mu.size() == qp.n_ineq(),
          "solve_qp: init size mismatch");

  SolveReport rep;
  rep.norm_K = estimate_spectral_norm(qp.A, qp.C, params.power);
  const double L_f = qp.n() > 0 ? qp.q.maxCoeff() : 0.0;
  double tau = params.tau, sigma = params.sigma;
  if (tau <= 0.0 || sigma <= 0.0) choose_step_sizes(L_f, rep.norm_K, tau, sigma);
  rep.tau = tau;
  rep.sigma = sigma;
  rep.step_condition_ok = step_condition_holds(tau, sigma, L_f, rep.norm_K);
  rep.gamma = accelerate && qp.n() > 0 ? std::max(qp.q.minCoeff(), 0.0) : 0.0;

  detail::CpKernel kernel(qp, tau, sigma, params.theta);
  CpState st = CpState::from_point(init);
  // Clamp the start into the box so the first extrapolation is sane.
  st.y = st.y.cwiseMax(qp.l).cwiseMin(qp.u);
  st.y_bar = st.y;
  st.mu = st.mu.cwiseMax(0.0);

  const auto current_residuals = [&](const CpState& s) {
    PrimalDualPoint pt{s.y, s.lam, s.mu, {}, {}};
    if (ref.orig != nullptr) {
      const PrimalDualPoint unscaled = unscale_solution(pt, *ref.scaling);
      return residuals(*ref.orig, unscaled);
    }
    return residuals(qp, pt);
  };

  int it = 0;
  for (; it < params.max_iters; ++it) {
    kernel.step(st);
    if (rep.gamma > 0.0) {
      kernel.theta = 1.0 / std::sqrt(1.0 + rep.gamma * kernel.tau);
      kernel.tau *= kernel.theta;
      kernel.sigma /= kernel.theta;
      kernel.rebuild_prox();
    }
    if ((it + 1) % params.check_every == 0 || it + 1 == params.max_iters) {
      if (!st.y.allFinite() || !st.lam.allFinite() || !st.mu.allFinite())
        throw NonFiniteError("solve_qp: iterate diverged to non-finite values");
      const Residuals r = current_residuals(st);
      if (r.prim_inf <= params.eps_prim && r.gap <= params.eps_gap) {
        rep.converged = true;
        rep.final_residuals = r;
        ++it;
        break;
      }
      if (it + 1 == params.max_iters) rep.final_residuals = r;
    }
  }
  rep.iters = it;
  rep.point = PrimalDualPoint{st.y, st.lam, st.mu, {}, {}};
  rep.objective = qp.objective(st.y);
  return rep;
}

}  // namespace detail

/// Plain solve (theta fixed at params.theta, default 1).
inline SolveReport solve_qp(const QpData& qp, const PrimalDualPoint& init,
                            const CpParams& params = {}) {
  return detail::solve_qp_impl(qp, init, params, false);
}

/// Accelerated solve: when min_i q_i > 0 the schedule shrinks tau, grows
/// sigma and pulls theta below 1 every iteration. With some q_i = 0 the
/// modulus is 0 and the iterates match solve_qp exactly.
inline SolveReport solve_qp_accelerated(const QpData& qp, const PrimalDualPoint& init,
                                        const CpParams& params = {}) {
  return detail::solve_qp_impl(qp, init, params, true);
}

/// Equilibrated solve: Ruiz-scale a copy, iterate on the scaled data while
/// measuring termination residuals on the original problem, and return the
/// unscaled solution (with a final exact box clamp, since unscaling can be
/// off by one ulp at an active bound).
inline SolveReport solve_qp_preconditioned(const QpData& qp, const PrimalDualPoint& init,
                                           const CpParams& params = {},
                                           bool accelerate = false,
                                           const RuizParams& ruiz = {}) {
  QpData scaled = qp;
  const ScalingRecord rec = ruiz_equilibrate(scaled, ruiz);
  detail::TerminationRef ref{&qp, &rec};
  SolveReport rep =
      detail::solve_qp_impl(scaled, scale_solution(init, rec), params, accelerate, ref);
  rep.point = unscale_solution(rep.point, rec);
  rep.point.y = rep.point.y.cwiseMax(qp.l).cwiseMin(qp.u);
  rep.objective = qp.objective(rep.point.y);
  rep.used_scaling = true;
  return rep;
}

/// Recovers the box multipliers from stationarity: s = Qy + c + A'lam +
/// C'mu must equal alpha - beta, with alpha supported on active lower
/// bounds and beta on active upper bounds. At an exactly pinned variable
/// (l_i = u_i) the lower multiplier takes the whole value.
inline void recover_bound_multipliers(const QpData& qp, PrimalDualPoint& pt,
                                      double active_tol = 1e-8) {
  Vec s = qp.q.cwiseProduct(pt.y) + qp.c;
  if (qp.n_eq() > 0) s.noalias() += qp.A.transpose() * pt.lam;
  if (qp.n_ineq() > 0) s.noalias() += qp.C.transpose() * pt.mu;
  pt.alpha = Vec::Zero(qp.n());
  pt.beta = Vec::Zero(qp.n());
  for (Eigen::Index i = 0; i < qp.n(); ++i) {
    const bool at_lower = std::isfinite(qp.l[i]) && pt.y[i] <= qp.l[i] + active_tol;
    const bool at_upper = std::isfinite(qp.u[i]) && pt.y[i] >= qp.u[i] - active_tol;
    if (at_lower) pt.alpha[i] = std::max(0.0, s[i]);
    if (at_upper && !(at_lower && qp.l[i] == qp.u[i])) pt.beta[i] = std::max(0.0, -s[i]);
  }
}

}  // namespace nlproj
