#pragma once

/// @file family.hpp Parametric problem families: the analytic description of
///
///   min_y f(x, y)   s.t.  h(x, y) = 0,  g(x, y) <= 0,  l(x) <= y <= u(x)
///
/// for a parameter vector x. Four built-in kinds cover the generator recipes;
/// a callback kind admits user-defined problems. The library never parses
/// expressions; everything is an evaluator.

#include "nlproj/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nlproj {

enum class FamilyKind { kQp, kQcqp, kConvexNlp, kNonconvex, kCustom };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::kQp: return "qp";
    case FamilyKind::kQcqp: return "qcqp";
    case FamilyKind::kConvexNlp: return "nlp";
    case FamilyKind::kNonconvex: return "nonconvex";
    default: return "custom";
  }
}

/// Dense convex quadratic objective with affine constraints:
///   f = 0.5 y'Qy + c0'y,  h = Ay - b0 - Bx,  g = Cy - d0,
///   bounds l0 + Lb x <= y <= u0 + Ub x.
/// y_center + T x is a feasibility witness for every x in the box.
struct QpFamilyData {
  Mat Q;
  Vec c0;
  Mat A;
  Vec b0;
  Mat B;
  Mat C;
  Vec d0;
  Vec l0, u0;
  Mat Lb, Ub;
  Vec x_low, x_high;
  Vec y_center;
  Mat T;
  double lip_grad = 0.0;  ///< largest eigenvalue of Q
};

/// Same objective/equality block as QpFamilyData; inequality i is the
/// rank-one quadratic  0.5 alpha_i (r_i'y)^2 + r_i'y <= beta_i + (E x)_i.
struct QcqpFamilyData {
  Mat Q;
  Vec c0;
  Mat A;
  Vec b0;
  Mat B;
  Mat R;  ///< rows are the directions r_i
  Vec alpha;
  Vec beta;
  Mat E;
  Vec l0, u0;
  Mat Lb, Ub;
  Vec x_low, x_high;
  Vec y_center;
  Mat T;
  double lip_grad = 0.0;
};

/// Convex exponential/quadratic inequalities on the QP backbone:
///   g_i = a_i'exp(y) + sum_j w_ij y_j^2 - beta_i - (E x)_i,
/// with a_i >= 0 and w_ij >= 0 (diagonal PSD W_i).
struct ConvexNlpFamilyData {
  Mat Q;
  Vec c0;
  Mat A;
  Vec b0;
  Mat B;
  Mat Aexp;   ///< rows a_i, sparse nonnegative support
  Mat Wdiag;  ///< rows are diag(W_i), sparse nonnegative
  Vec beta;
  Mat E;
  Vec l0, u0;
  Mat Lb, Ub;
  Vec x_low, x_high;
  Vec y_center;
  Mat T;
  double lip_grad = 0.0;
};

/// Sinusoidally perturbed diagonal quadratic with the parameter on the
/// equality right-hand side:
///   f = 0.5 y'diag(q)y + p'sin(y),  h = Ay - x,  g = Gy - h_rhs.
struct NonconvexFamilyData {
  Vec q;
  Vec p;
  Mat A;
  Mat G;
  Vec h_rhs;
  Vec l0, u0;  ///< wide constant box, never meant to bind
  Vec x_low, x_high;
  Mat A_pinv;  ///< min-norm witness y = A_pinv x
  double lip_grad = 0.0;  ///< max q_i + max |p_i|
};

/// User-supplied evaluators. First-order callbacks are mandatory; the
/// second-order ones are only needed when the family is differentiated
/// through the projection.
struct CustomFamilyData {
  std::function<double(const Vec&, const Vec&)> f;
  std::function<Vec(const Vec&, const Vec&)> grad_f;
  std::function<Vec(const Vec&, const Vec&)> hess_diag;
  std::function<Vec(const Vec&, const Vec&)> h;
  std::function<Mat(const Vec&, const Vec&)> jac_h;
  std::function<Vec(const Vec&, const Vec&)> g;
  std::function<Mat(const Vec&, const Vec&)> jac_g;
  std::function<Vec(const Vec&)> lower;
  std::function<Vec(const Vec&)> upper;
  Vec x_low, x_high;
  std::optional<double> lip_grad;

  // Second-order extensions for the adjoint route.
  std::function<Vec(const Vec&, const Vec&, const Vec&)> hess_f_vec;  ///< H_f(x,y) v
  std::function<Vec(const Vec&, const Vec&)> third_diag;  ///< d hess_diag_i / d y_i
  /// Hessian-vector product of inequality row i. Null means affine g.
  std::function<Vec(const Vec&, const Vec&, int, const Vec&)> g_hess_vec;
  std::function<Vec(const Vec&)> feasible_point;
};

/// A parametric family plus its dimensions. Construct via the make_* helpers
/// or the generators; aggregate layout is deliberate, matching QpData.
struct ParametricNlpFamily {
  FamilyKind kind = FamilyKind::kCustom;
  int n_vars = 0;
  int n_eq = 0;
  int n_ineq = 0;
  int n_params = 0;
  std::variant<QpFamilyData, QcqpFamilyData, ConvexNlpFamilyData, NonconvexFamilyData,
               CustomFamilyData>
      data;

  const Vec& x_low() const;
  const Vec& x_high() const;

  double f(const Vec& x, const Vec& y) const;
  Vec grad_f(const Vec& x, const Vec& y) const;
  Vec hess_diag(const Vec& x, const Vec& y) const;
  Vec h(const Vec& x, const Vec& y) const;
  Mat jac_h(const Vec& x, const Vec& y) const;
  Vec g(const Vec& x, const Vec& y) const;
  Mat jac_g(const Vec& x, const Vec& y) const;
  Vec lower(const Vec& x) const;
  Vec upper(const Vec& x) const;

  /// Global Lipschitz constant of grad_f when known.
  std::optional<double> lipschitz_grad() const;

  /// Full Hessian-vector product of the objective.
  Vec hess_f_vec(const Vec& x, const Vec& y, const Vec& v) const;
  /// Derivative of hess_diag_i with respect to y_i (third derivative along
  /// the diagonal; exact for every built-in, all of which have diagonal
  /// third-derivative structure).
  Vec third_diag(const Vec& x, const Vec& y) const;
  /// Hessian-vector product of inequality row i.
  Vec g_hess_vec(const Vec& x, const Vec& y, int row, const Vec& v) const;
  bool has_second_order() const;

  /// Feasible witness for x in the box, when the family carries one.
  std::optional<Vec> feasible_point(const Vec& x) const;

  EvalRecord evaluate(const Vec& x, const Vec& y) const;

  /// Structural checks plus finite-difference probes of every analytic
  /// derivative. Returns human-readable violations; empty means clean.
  std::vector<std::string> validate(std::uint64_t seed = 0, int n_probes = 100) const;
};

namespace detail {

inline bool in_box(const Vec& x, const Vec& lo, const Vec& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

}  // namespace detail

inline const Vec& ParametricNlpFamily::x_low() const {
  return std::visit([](const auto& d) -> const Vec& { return d.x_low; }, data);
}

inline const Vec& ParametricNlpFamily::x_high() const {
  return std::visit([](const auto& d) -> const Vec& { return d.x_high; }, data);
}

inline double ParametricNlpFamily::f(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp:
    case FamilyKind::kQcqp:
    case FamilyKind::kConvexNlp: {
      const auto quad = [&](const Mat& Q, const Vec& c0) {
        return 0.5 * y.dot(Q * y) + c0.dot(y);
      };
      if (kind == FamilyKind::kQp) {
        const auto& d = std::get<QpFamilyData>(data);
        return quad(d.Q, d.c0);
      }
      if (kind == FamilyKind::kQcqp) {
        const auto& d = std::get<QcqpFamilyData>(data);
        return quad(d.Q, d.c0);
      }
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      return quad(d.Q, d.c0);
    }
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return 0.5 * y.dot(d.q.cwiseProduct(y)) + d.p.dot(y.array().sin().matrix());
    }
    default:
      return std::get<CustomFamilyData>(data).f(x, y);
  }
}

inline Vec ParametricNlpFamily::grad_f(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp: {
      const auto& d = std::get<QpFamilyData>(data);
      return d.Q * y + d.c0;
    }
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      return d.Q * y + d.c0;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      return d.Q * y + d.c0;
    }
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return d.q.cwiseProduct(y) + d.p.cwiseProduct(y.array().cos().matrix());
    }
    default:
      return std::get<CustomFamilyData>(data).grad_f(x, y);
  }
}

inline Vec ParametricNlpFamily::hess_diag(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp:
      return std::get<QpFamilyData>(data).Q.diagonal();
    case FamilyKind::kQcqp:
      return std::get<QcqpFamilyData>(data).Q.diagonal();
    case FamilyKind::kConvexNlp:
      return std::get<ConvexNlpFamilyData>(data).Q.diagonal();
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return d.q - d.p.cwiseProduct(y.array().sin().matrix());
    }
    default:
      return std::get<CustomFamilyData>(data).hess_diag(x, y);
  }
}

inline Vec ParametricNlpFamily::h(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp: {
      const auto& d = std::get<QpFamilyData>(data);
      return d.A * y - d.b0 - d.B * x;
    }
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      return d.A * y - d.b0 - d.B * x;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      return d.A * y - d.b0 - d.B * x;
    }
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return d.A * y - x;
    }
    default:
      return std::get<CustomFamilyData>(data).h(x, y);
  }
}

inline Mat ParametricNlpFamily::jac_h(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp:
      return std::get<QpFamilyData>(data).A;
    case FamilyKind::kQcqp:
      return std::get<QcqpFamilyData>(data).A;
    case FamilyKind::kConvexNlp:
      return std::get<ConvexNlpFamilyData>(data).A;
    case FamilyKind::kNonconvex:
      return std::get<NonconvexFamilyData>(data).A;
    default:
      return std::get<CustomFamilyData>(data).jac_h(x, y);
  }
}

inline Vec ParametricNlpFamily::g(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp: {
      const auto& d = std::get<QpFamilyData>(data);
      return d.C * y - d.d0;
    }
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      const Vec ry = d.R * y;
      return 0.5 * d.alpha.cwiseProduct(ry.cwiseProduct(ry)) + ry - d.beta - d.E * x;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      const Vec ey = y.array().exp().matrix();
      const Vec y2 = y.cwiseProduct(y);
      return d.Aexp * ey + d.Wdiag * y2 - d.beta - d.E * x;
    }
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return d.G * y - d.h_rhs;
    }
    default:
      return std::get<CustomFamilyData>(data).g(x, y);
  }
}

inline Mat ParametricNlpFamily::jac_g(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp:
      return std::get<QpFamilyData>(data).C;
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      const Vec ry = d.R * y;
      // row i: (alpha_i (r_i'y) + 1) r_i'
      return (d.alpha.cwiseProduct(ry) + Vec::Ones(ry.size())).asDiagonal() * d.R;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      const Vec ey = y.array().exp().matrix();
      Mat J = d.Aexp * ey.asDiagonal();
      J += 2.0 * (d.Wdiag * y.asDiagonal());
      return J;
    }
    case FamilyKind::kNonconvex:
      return std::get<NonconvexFamilyData>(data).G;
    default:
      return std::get<CustomFamilyData>(data).jac_g(x, y);
  }
}

inline Vec ParametricNlpFamily::lower(const Vec& x) const {
  switch (kind) {
    case FamilyKind::kQp: {
      const auto& d = std::get<QpFamilyData>(data);
      return d.l0 + d.Lb * x;
    }
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      return d.l0 + d.Lb * x;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      return d.l0 + d.Lb * x;
    }
    case FamilyKind::kNonconvex:
      return std::get<NonconvexFamilyData>(data).l0;
    default:
      return std::get<CustomFamilyData>(data).lower(x);
  }
}

inline Vec ParametricNlpFamily::upper(const Vec& x) const {
  switch (kind) {
    case FamilyKind::kQp: {
      const auto& d = std::get<QpFamilyData>(data);
      return d.u0 + d.Ub * x;
    }
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      return d.u0 + d.Ub * x;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      return d.u0 + d.Ub * x;
    }
    case FamilyKind::kNonconvex:
      return std::get<NonconvexFamilyData>(data).u0;
    default:
      return std::get<CustomFamilyData>(data).upper(x);
  }
}

inline std::optional<double> ParametricNlpFamily::lipschitz_grad() const {
  switch (kind) {
    case FamilyKind::kQp:
      return std::get<QpFamilyData>(data).lip_grad;
    case FamilyKind::kQcqp:
      return std::get<QcqpFamilyData>(data).lip_grad;
    case FamilyKind::kConvexNlp:
      return std::get<ConvexNlpFamilyData>(data).lip_grad;
    case FamilyKind::kNonconvex:
      return std::get<NonconvexFamilyData>(data).lip_grad;
    default:
      return std::get<CustomFamilyData>(data).lip_grad;
  }
}

inline Vec ParametricNlpFamily::hess_f_vec(const Vec& x, const Vec& y, const Vec& v) const {
  switch (kind) {
    case FamilyKind::kQp:
      return std::get<QpFamilyData>(data).Q * v;
    case FamilyKind::kQcqp:
      return std::get<QcqpFamilyData>(data).Q * v;
    case FamilyKind::kConvexNlp:
      return std::get<ConvexNlpFamilyData>(data).Q * v;
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return (d.q - d.p.cwiseProduct(y.array().sin().matrix())).cwiseProduct(v);
    }
    default: {
      const auto& d = std::get<CustomFamilyData>(data);
      if (!d.hess_f_vec) throw AdjointError("custom family lacks hess_f_vec");
      return d.hess_f_vec(x, y, v);
    }
  }
}

inline Vec ParametricNlpFamily::third_diag(const Vec& x, const Vec& y) const {
  switch (kind) {
    case FamilyKind::kQp:
    case FamilyKind::kQcqp:
    case FamilyKind::kConvexNlp:
      return Vec::Zero(n_vars);
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return -d.p.cwiseProduct(y.array().cos().matrix());
    }
    default: {
      const auto& d = std::get<CustomFamilyData>(data);
      if (!d.third_diag) throw AdjointError("custom family lacks third_diag");
      return d.third_diag(x, y);
    }
  }
}

inline Vec ParametricNlpFamily::g_hess_vec(const Vec& x, const Vec& y, int row,
                                           const Vec& v) const {
  switch (kind) {
    case FamilyKind::kQp:
    case FamilyKind::kNonconvex:
      return Vec::Zero(n_vars);
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      const Vec r = d.R.row(row).transpose();
      return Vec(d.alpha[row] * r.dot(v) * r);
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      const Vec diag = d.Aexp.row(row).transpose().cwiseProduct(y.array().exp().matrix()) +
                       2.0 * d.Wdiag.row(row).transpose();
      return diag.cwiseProduct(v);
    }
    default: {
      const auto& d = std::get<CustomFamilyData>(data);
      if (!d.g_hess_vec) return Vec::Zero(n_vars);
      return d.g_hess_vec(x, y, row, v);
    }
  }
}

inline bool ParametricNlpFamily::has_second_order() const {
  if (kind != FamilyKind::kCustom) return true;
  const auto& d = std::get<CustomFamilyData>(data);
  return static_cast<bool>(d.hess_f_vec) && static_cast<bool>(d.third_diag);
}

inline std::optional<Vec> ParametricNlpFamily::feasible_point(const Vec& x) const {
  switch (kind) {
    case FamilyKind::kQp: {
      const auto& d = std::get<QpFamilyData>(data);
      return d.y_center + d.T * x;
    }
    case FamilyKind::kQcqp: {
      const auto& d = std::get<QcqpFamilyData>(data);
      return d.y_center + d.T * x;
    }
    case FamilyKind::kConvexNlp: {
      const auto& d = std::get<ConvexNlpFamilyData>(data);
      return d.y_center + d.T * x;
    }
    case FamilyKind::kNonconvex: {
      const auto& d = std::get<NonconvexFamilyData>(data);
      return Vec(d.A_pinv * x);
    }
    default: {
      const auto& d = std::get<CustomFamilyData>(data);
      if (d.feasible_point) return d.feasible_point(x);
      return std::nullopt;
    }
  }
}

inline EvalRecord ParametricNlpFamily::evaluate(const Vec& x, const Vec& y) const {
  require(x.size() == n_params, "evaluate: parameter size mismatch");
  require(y.size() == n_vars, "evaluate: variable size mismatch");
  EvalRecord rec;
  rec.x_in_box = detail::in_box(x, x_low(), x_high());
  rec.f = f(x, y);
  rec.grad_f = grad_f(x, y);
  rec.hess_diag = hess_diag(x, y);
  rec.h = h(x, y);
  rec.jac_h = jac_h(x, y);
  rec.g = g(x, y);
  rec.jac_g = jac_g(x, y);
  rec.lower = lower(x);
  rec.upper = upper(x);
  if (!std::isfinite(rec.f)) throw NonFiniteError("evaluate: non-finite objective");
  require_finite(rec.grad_f, "grad_f");
  require_finite(rec.hess_diag, "hess_diag");
  require_finite(rec.h, "h");
  require_finite(rec.g, "g");
  if (!rec.jac_h.allFinite() || !rec.jac_g.allFinite())
    throw NonFiniteError("evaluate: non-finite Jacobian");
  require(rec.h.size() == n_eq && rec.g.size() == n_ineq, "evaluate: block size mismatch");
  require(rec.jac_h.rows() == n_eq && rec.jac_g.rows() == n_ineq,
          "evaluate: Jacobian row mismatch");
  return rec;
}

inline std::vector<std::string> ParametricNlpFamily::validate(std::uint64_t seed,
                                                              int n_probes) const {
  std::vector<std::string> issues;
  if (n_eq > n_vars) issues.push_back("n_eq exceeds n_vars");
  if (x_low().size() != n_params || x_high().size() != n_params)
    issues.push_back("parameter box size mismatch");

  Rng rng(derive_seed(seed, 17));
  const auto sample_x = [&] {
    Vec x(n_params);
    for (int i = 0; i < n_params; ++i) x[i] = rng.uniform(x_low()[i], x_high()[i]);
    return x;
  };

  // Bound ordering over a probe grid of parameters.
  for (int t = 0; t < 8; ++t) {
    const Vec x = sample_x();
    const Vec lo = lower(x), hi = upper(x);
    for (int i = 0; i < n_vars; ++i)
      if (!(lo[i] <= hi[i])) {
        issues.push_back("crossed bounds at a parameter probe");
        t = 8;
        break;
      }
  }

  // Central finite differences of every analytic derivative at random
  // interior probes. Step scales with the coordinate.
  const double tol = 1e-6;
  double max_rel = 0.0;
  std::string worst;
  const auto fd_probe = [&](const Vec& x, const Vec& y) {
    const auto rel = [](double got, double want) {
      return std::abs(got - want) / std::max({1.0, std::abs(got), std::abs(want)});
    };
    for (int j = 0; j < n_vars; ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(y[j]));
      Vec yp = y, ym = y;
      yp[j] += step;
      ym[j] -= step;
      const double dfd = (f(x, yp) - f(x, ym)) / (2.0 * step);
      const Vec gj = grad_f(x, y);
      double r = rel(gj[j], dfd);
      if (r > max_rel) max_rel = r, worst = "grad_f";
      const Vec gp = grad_f(x, yp), gm = grad_f(x, ym);
      r = rel(hess_diag(x, y)[j], (gp[j] - gm[j]) / (2.0 * step));
      if (r > max_rel) max_rel = r, worst = "hess_diag";
      if (n_eq > 0) {
        const Vec hp = h(x, yp), hm = h(x, ym);
        const Mat J = jac_h(x, y);
        for (int i = 0; i < n_eq; ++i) {
          r = rel(J(i, j), (hp[i] - hm[i]) / (2.0 * step));
          if (r > max_rel) max_rel = r, worst = "jac_h";
        }
      }
      if (n_ineq > 0) {
        const Vec ggp = g(x, yp), ggm = g(x, ym);
        const Mat J = jac_g(x, y);
        for (int i = 0; i < n_ineq; ++i) {
          r = rel(J(i, j), (ggp[i] - ggm[i]) / (2.0 * step));
          if (r > max_rel) max_rel = r, worst = "jac_g";
        }
      }
    }
  };

  for (int t = 0; t < n_probes; ++t) {
    const Vec x = sample_x();
    Vec y = rng.normal_vec(n_vars);
    if (auto w = feasible_point(x)) y = *w + 0.2 * y;
    fd_probe(x, y);
  }
  if (max_rel > tol)
    issues.push_back("finite-difference mismatch in " + worst + ", relative error " +
                     std::to_string(max_rel));
  return issues;
}

/// Assembles a QP-kind family, filling dimensions from the data block.
inline ParametricNlpFamily make_family(QpFamilyData d) {
  ParametricNlpFamily fam;
  fam.kind = FamilyKind::kQp;
  fam.n_vars = static_cast<int>(d.Q.rows());
  fam.n_eq = static_cast<int>(d.A.rows());
  fam.n_ineq = static_cast<int>(d.C.rows());
  fam.n_params = static_cast<int>(d.x_low.size());
  fam.data = std::move(d);
  return fam;
}

inline ParametricNlpFamily make_family(QcqpFamilyData d) {
  ParametricNlpFamily fam;
  fam.kind = FamilyKind::kQcqp;
  fam.n_vars = static_cast<int>(d.Q.rows());
  fam.n_eq = static_cast<int>(d.A.rows());
  fam.n_ineq = static_cast<int>(d.R.rows());
  fam.n_params = static_cast<int>(d.x_low.size());
  fam.data = std::move(d);
  return fam;
}

inline ParametricNlpFamily make_family(ConvexNlpFamilyData d) {
  ParametricNlpFamily fam;
  fam.kind = FamilyKind::kConvexNlp;
  fam.n_vars = static_cast<int>(d.Q.rows());
  fam.n_eq = static_cast<int>(d.A.rows());
  fam.n_ineq = static_cast<int>(d.Aexp.rows());
  fam.n_params = static_cast<int>(d.x_low.size());
  fam.data = std::move(d);
  return fam;
}

inline ParametricNlpFamily make_family(NonconvexFamilyData d) {
  ParametricNlpFamily fam;
  fam.kind = FamilyKind::kNonconvex;
  fam.n_vars = static_cast<int>(d.q.size());
  fam.n_eq = static_cast<int>(d.A.rows());
  fam.n_ineq = static_cast<int>(d.G.rows());
  fam.n_params = static_cast<int>(d.A.rows());
  fam.data = std::move(d);
  return fam;
}

inline ParametricNlpFamily make_family(CustomFamilyData d, int n_vars, int n_eq, int n_ineq) {
  ParametricNlpFamily fam;
  fam.kind = FamilyKind::kCustom;
  fam.n_vars = n_vars;
  fam.n_eq = n_eq;
  fam.n_ineq = n_ineq;
  fam.n_params = static_cast<int>(d.x_low.size());
  fam.data = std::move(d);
  return fam;
}

}  // namespace nlproj
