#pragma once

/// @file instance_gen.hpp Seeded generators for the four problem families.
/// Every family is feasible by construction: a witness y_c + T x (or the
/// min-norm equality solution) stays inside all constraints across the whole
/// parameter box, with inequality right sides sized by exact or sampled box
/// maxima.

#include "nlproj/family.hpp"

#include <vector>

namespace nlproj {

struct GenDims {
  int n_vars = 10;
  int n_eq = 3;
  int n_ineq = 5;
  int n_params = 5;
};

struct GenOptions {
  double bound_halfwidth = 5.0;   ///< box half-width r around the witness center
  double ineq_sparsity = 0.2;     ///< expected fraction of nonzeros per row
  double param_box = 10.0;        ///< parameter box is [-param_box, param_box]^p
  double coupling_scale = 0.3;    ///< magnitude budget for the witness map T
  double margin_qcqp = 1e-6;      ///< safety margin on sampled box maxima
  double margin_nlp = 1e-3;
};

namespace detail {

/// Max of fun over the parameter box: all corners for p <= 12 (exact for
/// functions convex in x), sampled corners above, plus 512 uniform draws.
template <typename F>
inline double box_max(const F& fun, const Vec& x_low, const Vec& x_high, Rng& rng) {
  const Eigen::Index p = x_low.size();
  double best = -std::numeric_limits<double>::infinity();
  const auto probe = [&](const Vec& x) { best = std::max(best, fun(x)); };
  if (p == 0) {
    probe(Vec(0));
    return best;
  }
  if (p <= 12) {
    for (std::uint64_t mask = 0; mask < (1ULL << p); ++mask) {
      Vec x(p);
      for (Eigen::Index i = 0; i < p; ++i) x[i] = (mask >> i) & 1 ? x_high[i] : x_low[i];
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
  for (int t = 0; t < 512; ++t) {
    Vec x(p);
    for (Eigen::Index i = 0; i < p; ++i) x[i] = rng.uniform(x_low[i], x_high[i]);
    probe(x);
  }
  return best;
}

/// Shared convex backbone: well-conditioned dense SPD objective, orthonormal
/// row-scaled equality block, witness map, and bounds tracking the witness.
struct Backbone {
  Mat Q;
  Vec c0;
  Mat A;
  Vec b0;
  Mat B;
  Vec l0, u0;
  Mat Lb, Ub;
  Vec x_low, x_high;
  Vec y_c;
  Mat T;
  double lip = 0.0;
};

inline Backbone draw_backbone(const GenDims& dims, const GenOptions& opt, Rng& rng) {
  const int n = dims.n_vars, m_eq = dims.n_eq, p = dims.n_params;
  Backbone bb;

  const Mat M = rng.normal_mat(n, n);
  bb.Q = M.transpose() * M / static_cast<double>(n);
  bb.Q += Mat(rng.uniform_vec(n, 1.2, 1.8).asDiagonal());
  bb.lip = Eigen::SelfAdjointEigenSolver<Mat>(bb.Q).eigenvalues().maxCoeff();
  bb.c0 = rng.uniform_vec(n, 0.5, 1.5);

  // Orthonormal equality directions from a QR factorization, scaled row-wise.
  bb.A = Mat(m_eq, n);
  if (m_eq > 0) {
    const Mat G = rng.normal_mat(n, n);
    const Mat Qorth = Eigen::HouseholderQR<Mat>(G).householderQ();
    bb.A = Qorth.leftCols(m_eq).transpose();
    for (int i = 0; i < m_eq; ++i) bb.A.row(i) *= rng.uniform(0.5, 1.5);
  }

  bb.y_c = rng.uniform_vec(n, -1.0, 1.0);
  const double t_scale = opt.coupling_scale / std::max(1, p);
  bb.T = Mat(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) bb.T(i, j) = rng.uniform(-t_scale, t_scale);

  bb.b0 = bb.A * bb.y_c;
  bb.B = bb.A * bb.T;
  bb.l0 = bb.y_c - Vec::Constant(n, opt.bound_halfwidth);
  bb.u0 = bb.y_c + Vec::Constant(n, opt.bound_halfwidth);
  bb.Lb = bb.T;
  bb.Ub = bb.T;
  bb.x_low = Vec::Constant(p, -opt.param_box);
  bb.x_high = Vec::Constant(p, opt.param_box);
  return bb;
}

/// Sparse row with at least one nonzero, Gaussian values.
inline Vec sparse_row(int n, double density, Rng& rng) {
  Vec row = Vec::Zero(n);
  bool any = false;
  for (int j = 0; j < n; ++j)
    if (rng.uniform() < density) {
      row[j] = rng.normal();
      any = any || row[j] != 0.0;
    }
  if (!any) row[static_cast<int>(rng.uniform_index(n))] = rng.normal();
  return row;
}

}  // namespace detail

/// Linear inequalities on the convex backbone. Right sides are the exact box
/// maxima of the coupled term, so the witness is feasible with the binding
/// corner exactly tight.
inline ParametricNlpFamily generate_qp_family(const GenDims& dims, std::uint64_t seed,
                                              const GenOptions& opt = {}) {
  Rng rng(derive_seed(seed, 0x9bULL));
  const auto bb = detail::draw_backbone(dims, opt, rng);
  QpFamilyData d;
  d.Q = bb.Q;
  d.c0 = bb.c0;
  d.A = bb.A;
  d.b0 = bb.b0;
  d.B = bb.B;
  d.l0 = bb.l0;
  d.u0 = bb.u0;
  d.Lb = bb.Lb;
  d.Ub = bb.Ub;
  d.x_low = bb.x_low;
  d.x_high = bb.x_high;
  d.y_center = bb.y_c;
  d.T = bb.T;
  d.lip_grad = bb.lip;

  d.C = Mat(dims.n_ineq, dims.n_vars);
  d.d0 = Vec(dims.n_ineq);
  for (int i = 0; i < dims.n_ineq; ++i) {
    Vec row = detail::sparse_row(dims.n_vars, opt.ineq_sparsity, rng);
    row /= row.norm();
    d.C.row(i) = row.transpose();
    // max over the symmetric box of (C T) x is the scaled absolute row sum.
    const Vec ct = bb.T.transpose() * row;
    d.d0[i] = row.dot(bb.y_c) + opt.param_box * ct.cwiseAbs().sum();
  }
  return make_family(std::move(d));
}

/// Rank-one convex quadratic inequalities on the same backbone, right sides
/// sized by sampled box maxima of the witness value plus a safety margin.
inline ParametricNlpFamily generate_qcqp_family(const GenDims& dims, std::uint64_t seed,
                                                const GenOptions& opt = {}) {
  Rng rng(derive_seed(seed, 0x9cULL));
  const auto bb = detail::draw_backbone(dims, opt, rng);
  QcqpFamilyData d;
  d.Q = bb.Q;
  d.c0 = bb.c0;
  d.A = bb.A;
  d.b0 = bb.b0;
  d.B = bb.B;
  d.l0 = bb.l0;
  d.u0 = bb.u0;
  d.Lb = bb.Lb;
  d.Ub = bb.Ub;
  d.x_low = bb.x_low;
  d.x_high = bb.x_high;
  d.y_center = bb.y_c;
  d.T = bb.T;
  d.lip_grad = bb.lip;

  d.R = Mat(dims.n_ineq, dims.n_vars);
  d.alpha = rng.uniform_vec(dims.n_ineq, 0.5, 1.5);
  d.E = Mat(dims.n_ineq, dims.n_params);
  d.beta = Vec(dims.n_ineq);
  for (int i = 0; i < dims.n_ineq; ++i) {
    Vec r = rng.normal_vec(dims.n_vars);
    r /= r.norm();
    d.R.row(i) = r.transpose();
    Vec e = rng.normal_vec(dims.n_params);
    if (dims.n_params > 0) e *= 0.5 / e.norm();
    d.E.row(i) = e.transpose();
    const double a = d.alpha[i];
    d.beta[i] = detail::box_max(
                    [&](const Vec& x) {
                      const double ry = r.dot(bb.y_c + bb.T * x);
                      return 0.5 * a * ry * ry + ry - e.dot(x);
                    },
                    bb.x_low, bb.x_high, rng) +
                opt.margin_qcqp;
  }
  return make_family(std::move(d));
}

/// Exponential-plus-quadratic convex inequalities with sparse nonnegative
/// supports; right sides again from sampled box maxima, with the larger
/// margin so probes keep real slack.
inline ParametricNlpFamily generate_convex_nlp_family(const GenDims& dims,
                                                      std::uint64_t seed,
                                                      const GenOptions& opt = {}) {
  Rng rng(derive_seed(seed, 0x9dULL));
  const auto bb = detail::draw_backbone(dims, opt, rng);
  ConvexNlpFamilyData d;
  d.Q = bb.Q;
  d.c0 = bb.c0;
  d.A = bb.A;
  d.b0 = bb.b0;
  d.B = bb.B;
  d.l0 = bb.l0;
  d.u0 = bb.u0;
  d.Lb = bb.Lb;
  d.Ub = bb.Ub;
  d.x_low = bb.x_low;
  d.x_high = bb.x_high;
  d.y_center = bb.y_c;
  d.T = bb.T;
  d.lip_grad = bb.lip;

  d.Aexp = Mat::Zero(dims.n_ineq, dims.n_vars);
  d.Wdiag = Mat::Zero(dims.n_ineq, dims.n_vars);
  d.E = Mat(dims.n_ineq, dims.n_params);
  d.beta = Vec(dims.n_ineq);
  for (int i = 0; i < dims.n_ineq; ++i) {
    bool any = false;
    for (int j = 0; j < dims.n_vars; ++j) {
      if (rng.uniform() < opt.ineq_sparsity) {
        d.Aexp(i, j) = rng.uniform(0.1, 1.0);
        any = true;
      }
      if (rng.uniform() < opt.ineq_sparsity) d.Wdiag(i, j) = rng.uniform(0.1, 0.5);
    }
    if (!any) d.Aexp(i, static_cast<int>(rng.uniform_index(dims.n_vars))) =
        rng.uniform(0.1, 1.0);
    Vec e = rng.normal_vec(dims.n_params);
    if (dims.n_params > 0) e *= 0.5 / e.norm();
    d.E.row(i) = e.transpose();
    const Vec a_row = d.Aexp.row(i).transpose();
    const Vec w_row = d.Wdiag.row(i).transpose();
    d.beta[i] = detail::box_max(
                    [&](const Vec& x) {
                      const Vec y = bb.y_c + bb.T * x;
                      return a_row.dot(y.array().exp().matrix()) +
                             w_row.dot(y.cwiseProduct(y)) - e.dot(x);
                    },
                    bb.x_low, bb.x_high, rng) +
                opt.margin_nlp;
  }
  return make_family(std::move(d));
}

/// Nonconvex family: diagonal quadratic plus a sinusoidal term, parameter on
/// the equality right side, Gaussian constraint blocks, inequality right
/// sides sized so the min-norm equality solution is feasible box-wide.
inline ParametricNlpFamily generate_nonconvex_family(const GenDims& dims,
                                                     std::uint64_t seed,
                                                     const GenOptions& opt = {}) {
  Rng rng(derive_seed(seed, 0x9eULL));
  const int n = dims.n_vars, m_eq = dims.n_eq, m_in = dims.n_ineq;
  NonconvexFamilyData d;
  d.q = rng.uniform_vec(n, 0.5, 1.5);
  d.p = rng.uniform_vec(n, 0.5, 1.5);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int attempt = 0;; ++attempt) {
    d.A = scale * rng.normal_mat(m_eq, n);
    if (m_eq == 0 || Eigen::FullPivLU<Mat>(d.A).rank() == m_eq) break;
    require(attempt < 8, "generate_nonconvex_family: rank-deficient draws");
  }
  d.G = scale * rng.normal_mat(m_in, n);
  d.A_pinv = m_eq > 0
                 ? Mat(d.A.transpose() * (d.A * d.A.transpose()).ldlt().solve(
                           Mat::Identity(m_eq, m_eq)))
                 : Mat::Zero(n, 0);
  d.h_rhs = Vec(m_in);
  const Mat GP = d.G * d.A_pinv;
  for (int i = 0; i < m_in; ++i)
    d.h_rhs[i] = opt.param_box * GP.row(i).cwiseAbs().sum();
  d.l0 = Vec::Constant(n, -1e3);
  d.u0 = Vec::Constant(n, 1e3);
  d.x_low = Vec::Constant(m_eq, -opt.param_box);
  d.x_high = Vec::Constant(m_eq, opt.param_box);
  d.lip_grad = d.q.maxCoeff() + d.p.cwiseAbs().maxCoeff();
  return make_family(std::move(d));
}

inline ParametricNlpFamily generate_family(FamilyKind kind, const GenDims& dims,
                                           std::uint64_t seed, const GenOptions& opt = {}) {
  switch (kind) {
    case FamilyKind::kQp: return generate_qp_family(dims, seed, opt);
    case FamilyKind::kQcqp: return generate_qcqp_family(dims, seed, opt);
    case FamilyKind::kConvexNlp: return generate_convex_nlp_family(dims, seed, opt);
    case FamilyKind::kNonconvex: return generate_nonconvex_family(dims, seed, opt);
    default: throw DimensionError("generate_family: no generator for custom kind");
  }
}

/// Uniform parameter draws over the family's box, deterministic per seed.
inline std::vector<Vec> sample_parameters(const ParametricNlpFamily& fam, int count,
                                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xbadULL));
  std::vector<Vec> xs;
  xs.reserve(count);
  for (int t = 0; t < count; ++t) {
    Vec x(fam.n_params);
    for (int i = 0; i < fam.n_params; ++i)
      x[i] = rng.uniform(fam.x_low()[i], fam.x_high()[i]);
    xs.push_back(std::move(x));
  }
  return xs;
}

}  // namespace nlproj
