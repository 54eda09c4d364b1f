#pragma once

/// @file soc.hpp Exact route for quadratically constrained programs: each
/// convex quadratic inequality y'Cy + d'y <= e - E x completes the square
/// into a ball constraint ||R y + q|| <= r(x), and the primal-dual solver
/// swaps its nonnegativity prox for vector soft-thresholding on the ball
/// duals. One solve replaces the layered linearization for these programs.

#include "nlproj/cp_solver.hpp"
#include "nlproj/family.hpp"

#include <vector>

namespace nlproj {

/// Ball reformulation of one quadratic inequality. R has rank rows, so a
/// rank-deficient C contributes a lower-dimensional ball. The radius at x is
/// sqrt(radius_sq_const - E x).
struct SocConstraint {
  Mat R;        ///< rank x n factor with R'R = C
  Vec q;        ///< center shift, 0.5 * pinv(R)' d
  double radius_sq_const = 0.0;  ///< e + ||q||^2
  Vec E_row;    ///< parameter coupling of the squared radius

  double radius_sq(const Vec& x) const { return radius_sq_const - E_row.dot(x); }
  double radius(const Vec& x) const { return std::sqrt(std::max(radius_sq(x), 0.0)); }
};

/// Completes the square for y'Cy + d'y <= e - E x over a parameter box.
/// Requires C PSD (eigenvalues >= -1e-10, negatives floored), d in the range
/// of C, and a nonnegative squared radius across the box; violations throw
/// ConeDataError. Box checking enumerates all corners up to 2^12 parameters
/// and falls back to corner sampling plus 512 uniform draws above that.
inline SocConstraint complete_square(const Mat& C, const Vec& d, double e, const Vec& E_row,
                                     const Vec& x_low, const Vec& x_high,
                                     std::uint64_t seed = 0) {
  const Eigen::Index n = C.rows();
  require(C.cols() == n && d.size() == n, "complete_square: shape mismatch");
  require(E_row.size() == x_low.size() && x_low.size() == x_high.size(),
          "complete_square: parameter box mismatch");

  Eigen::SelfAdjointEigenSolver<Mat> es(C);
  const Vec vals = es.eigenvalues();
  if (vals.size() > 0 && vals.minCoeff() < -1e-10)
    throw ConeDataError("complete_square: indefinite quadratic block");
  const double lam_max = vals.size() > 0 ? std::max(vals.maxCoeff(), 0.0) : 0.0;
  const double cutoff = 1e-10 * std::max(lam_max, 1.0);

  std::vector<int> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (vals[i] > cutoff) keep.push_back(static_cast<int>(i));
  const int rank = static_cast<int>(keep.size());

  SocConstraint soc;
  soc.R = Mat(rank, n);
  soc.q = Vec(rank);
  Vec d_range = Vec::Zero(n);
  for (int j = 0; j < rank; ++j) {
    const Vec v = es.eigenvectors().col(keep[j]);
    const double lam = vals[keep[j]];
    soc.R.row(j) = std::sqrt(lam) * v.transpose();
    // q = 0.5 pinv(R)' d, and pinv(R)' = Lambda^{-1/2} V' on the kept space.
    soc.q[j] = 0.5 * v.dot(d) / std::sqrt(lam);
    d_range += v.dot(d) * v;
  }
  if ((d - d_range).norm() > 1e-8 * std::max(1.0, d.norm()))
    throw ConeDataError("complete_square: linear term outside the range of C");

  soc.radius_sq_const = e + soc.q.squaredNorm();
  soc.E_row = E_row;

  // Nonnegativity of the squared radius over the box: corners (all of them
  // up to 2^12 parameters, sampled above that) plus a Latin-hypercube sweep.
  // The squared radius is linear in x, so the full corner scan is exact.
  const Eigen::Index p = x_low.size();
  double min_r2 = soc.radius_sq_const;
  if (p > 0) {
    const auto probe = [&](const Vec& x) { min_r2 = std::min(min_r2, soc.radius_sq(x)); };
    Rng rng(derive_seed(seed, 0x50cULL));
    if (p <= 12) {
      for (std::uint64_t mask = 0; mask < (1ULL << p); ++mask) {
        Vec x(p);
        for (Eigen::Index i = 0; i < p; ++i)
          x[i] = (mask >> i) & 1 ? x_high[i] : x_low[i];
        probe(x);
      }
    } else {
      for (int t = 0; t < 4096; ++t) {
        Vec x(p);
        for (Eigen::Index i = 0; i < p; ++i)
          x[i] = rng.uniform() < 0.5 ? x_low[i] : x_high[i];
        probe(x);
      }
    }
    const int n_lhs = 512;
    std::vector<std::vector<int>> strata(p, std::vector<int>(n_lhs));
    for (Eigen::Index i = 0; i < p; ++i) {
      for (int t = 0; t < n_lhs; ++t) strata[i][t] = t;
      for (int t = n_lhs - 1; t > 0; --t)
        std::swap(strata[i][t], strata[i][rng.uniform_index(t + 1)]);
    }
    for (int t = 0; t < n_lhs; ++t) {
      Vec x(p);
      for (Eigen::Index i = 0; i < p; ++i) {
        const double frac = (strata[i][t] + rng.uniform()) / n_lhs;
        x[i] = x_low[i] + frac * (x_high[i] - x_low[i]);
      }
      probe(x);
    }
  }
  if (min_r2 < 0.0)
    throw ConeDataError("complete_square: negative squared radius over the box");
  return soc;
}

/// Projection of v onto the ball of the given radius: vector
/// soft-thresholding in the dual update. Nonexpansive; radius 0 maps
/// everything to the origin, and the origin is always a fixed point.
inline Vec ball_prox(const Vec& v, double radius) {
  const double nrm = v.norm();
  if (nrm <= radius) return v;
  if (nrm == 0.0) return Vec::Zero(v.size());
  return (radius / nrm) * v;
}

/// min 0.5 y'Qy + c'y  s.t.  A y = b,  ||R_i y + q_i|| <= r_i,  l <= y <= u,
/// with Q dense PSD. The equality right side and ball radii are resolved for
/// a concrete parameter before solving.
struct SocProgram {
  Mat Q;
  Vec c;
  Mat A;
  Vec b;
  std::vector<SocConstraint> balls;
  Vec radii;  ///< resolved r_i(x) for the instance being solved
  Vec l, u;
};

/// Ball-constrained solve report; mu blocks are stacked per ball.
struct SocSolveReport {
  Vec y;
  Vec lam;
  std::vector<Vec> mu;
  bool converged = false;
  int iters = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double prim_inf = 0.0;
  double gap = 0.0;
};

/// Primal-dual iteration with per-ball dual blocks. The primal prox handles
/// the dense quadratic through a cached Cholesky factor of I + tau Q; duals
/// on ball i update as v - prox onto the sigma r_i ball (Moreau), which is
/// exactly the soft-thresholding shrink.
inline SocSolveReport solve_qcqp_soc(const SocProgram& prog, const CpParams& params = {}) {
  const Eigen::Index n = prog.Q.rows(), m_eq = prog.A.rows();
  const int n_balls = static_cast<int>(prog.balls.size());
  require(prog.radii.size() == n_balls, "solve_qcqp_soc: radii not resolved");

  // Stacked operator for the step-size rule: equality block over all balls.
  Eigen::Index rows = m_eq;
  for (const auto& b : prog.balls) rows += b.R.rows();
  Mat K(rows, n);
  K.topRows(m_eq) = prog.A;
  Eigen::Index at = m_eq;
  for (const auto& b : prog.balls) {
    K.middleRows(at, b.R.rows()) = b.R;
    at += b.R.rows();
  }
  const double norm_K = estimate_spectral_norm(K, Mat(0, n), params.power);
  const double L_f = n > 0 ? prog.Q.diagonal().maxCoeff() : 0.0;
  double tau = params.tau, sigma = params.sigma;
  if (tau <= 0.0 || sigma <= 0.0) choose_step_sizes(L_f, norm_K, tau, sigma);

  const Eigen::LLT<Mat> prox(Mat(Mat::Identity(n, n) + tau * prog.Q));
  if (prox.info() != Eigen::Success)
    throw SingularKktError("solve_qcqp_soc: prox factorization failed");

  Vec y = Vec::Zero(n), y_bar = y, lam = Vec::Zero(m_eq);
  std::vector<Vec> mu(n_balls);
  for (int i = 0; i < n_balls; ++i) mu[i] = Vec::Zero(prog.balls[i].R.rows());

  SocSolveReport rep;
  const auto residuals_now = [&]() {
    double prim = 0.0, gap = 0.0;
    if (m_eq > 0) {
      const Vec rh = prog.A * y - prog.b;
      prim = rh.cwiseAbs().maxCoeff();
      gap += lam.dot(rh);
    }
    for (int i = 0; i < n_balls; ++i) {
      const Vec w = prog.balls[i].R * y + prog.balls[i].q;
      prim = std::max(prim, w.norm() - prog.radii[i]);
      gap += mu[i].dot(w) - prog.radii[i] * mu[i].norm();
    }
    return std::pair<double, double>(std::max(prim, 0.0), std::abs(gap));
  };

  int it = 0;
  for (; it < params.max_iters; ++it) {
    if (m_eq > 0) lam.noalias() += sigma * (prog.A * y_bar - prog.b);
    for (int i = 0; i < n_balls; ++i) {
      const Vec v = mu[i] + sigma * (prog.balls[i].R * y_bar + prog.balls[i].q);
      mu[i] = v - ball_prox(v, sigma * prog.radii[i]);
    }
    Vec s = y - tau * prog.c;
    if (m_eq > 0) s.noalias() -= tau * (prog.A.transpose() * lam);
    for (int i = 0; i < n_balls; ++i)
      s.noalias() -= tau * (prog.balls[i].R.transpose() * mu[i]);
    const Vec y_new = Vec(prox.solve(s)).cwiseMax(prog.l).cwiseMin(prog.u);
    y_bar = y_new + params.theta * (y_new - y);
    y = y_new;

    if ((it + 1) % params.check_every == 0 || it + 1 == params.max_iters) {
      if (!y.allFinite()) throw NonFiniteError("solve_qcqp_soc: non-finite iterate");
      const auto [prim, gap] = residuals_now();
      rep.prim_inf = prim;
      rep.gap = gap;
      if (prim <= params.eps_prim && gap <= params.eps_gap) {
        rep.converged = true;
        ++it;
        break;
      }
    }
  }
  rep.y = y;
  rep.lam = lam;
  rep.mu = mu;
  rep.iters = it;
  rep.objective = 0.5 * y.dot(prog.Q * y) + prog.c.dot(y);
  return rep;
}

/// Assembles the ball program for one instance of a rank-one QCQP family.
/// Constraint i, 0.5 a_i (r_i'y)^2 + r_i'y <= beta_i + E_i x, is the cone
/// form with C = 0.5 a_i r_i r_i', d = r_i, e = beta_i and coupling -E_i.
inline SocProgram soc_program_from_family(const ParametricNlpFamily& fam, const Vec& x) {
  require(fam.kind == FamilyKind::kQcqp, "soc_program_from_family: QCQP family required");
  const auto& d = std::get<QcqpFamilyData>(fam.data);
  SocProgram prog;
  prog.Q = d.Q;
  prog.c = d.c0;
  prog.A = d.A;
  prog.b = d.b0 + d.B * x;
  prog.l = d.l0 + d.Lb * x;
  prog.u = d.u0 + d.Ub * x;
  prog.radii = Vec(d.R.rows());
  for (int i = 0; i < d.R.rows(); ++i) {
    const Vec r = d.R.row(i).transpose();
    const Mat C = 0.5 * d.alpha[i] * (r * r.transpose());
    prog.balls.push_back(
        complete_square(C, r, d.beta[i], -d.E.row(i).transpose(), d.x_low, d.x_high));
    prog.radii[i] = prog.balls.back().radius(x);
  }
  return prog;
}

}  // namespace nlproj
