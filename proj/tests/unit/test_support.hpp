#pragma once

/// Shared builders for the tiny hand-constructed families the tests probe.

#include "nlproj/family.hpp"

namespace nlproj::testing {

/// One variable, f = 0.5*(y - target)^2, no constraints, wide box.
inline ParametricNlpFamily pull_to_point_1d(double target, double box = 1e3) {
  CustomFamilyData d;
  d.f = [target](const Vec&, const Vec& y) { return 0.5 * (y[0] - target) * (y[0] - target); };
  d.grad_f = [target](const Vec&, const Vec& y) { return Vec::Constant(1, y[0] - target); };
  d.hess_diag = [](const Vec&, const Vec&) { return Vec::Ones(1); };
  d.h = [](const Vec&, const Vec&) { return Vec(0); };
  d.jac_h = [](const Vec&, const Vec&) { return Mat(0, 1); };
  d.g = [](const Vec&, const Vec&) { return Vec(0); };
  d.jac_g = [](const Vec&, const Vec&) { return Mat(0, 1); };
  d.lower = [box](const Vec&) { return Vec::Constant(1, -box); };
  d.upper = [box](const Vec&) { return Vec::Constant(1, box); };
  d.x_low = Vec::Constant(1, -1.0);
  d.x_high = Vec::Constant(1, 1.0);
  d.lip_grad = 1.0;
  d.hess_f_vec = [](const Vec&, const Vec&, const Vec& v) { return v; };
  d.third_diag = [](const Vec&, const Vec&) { return Vec::Zero(1); };
  return make_family(std::move(d), 1, 0, 0);
}

/// One variable, f = 0.5*(y-2)^2 with the convex cut g(y) = y^2 - 1 <= 0.
inline ParametricNlpFamily parabola_cut_1d() {
  CustomFamilyData d;
  d.f = [](const Vec&, const Vec& y) { return 0.5 * (y[0] - 2.0) * (y[0] - 2.0); };
  d.grad_f = [](const Vec&, const Vec& y) { return Vec::Constant(1, y[0] - 2.0); };
  d.hess_diag = [](const Vec&, const Vec&) { return Vec::Ones(1); };
  d.h = [](const Vec&, const Vec&) { return Vec(0); };
  d.jac_h = [](const Vec&, const Vec&) { return Mat(0, 1); };
  d.g = [](const Vec&, const Vec& y) { return Vec::Constant(1, y[0] * y[0] - 1.0); };
  d.jac_g = [](const Vec&, const Vec& y) { return Mat::Constant(1, 1, 2.0 * y[0]); };
  d.lower = [](const Vec&) { return Vec::Constant(1, -1e3); };
  d.upper = [](const Vec&) { return Vec::Constant(1, 1e3); };
  d.x_low = Vec::Constant(1, -1.0);
  d.x_high = Vec::Constant(1, 1.0);
  d.lip_grad = 1.0;
  d.hess_f_vec = [](const Vec&, const Vec&, const Vec& v) { return v; };
  d.third_diag = [](const Vec&, const Vec&) { return Vec::Zero(1); };
  d.g_hess_vec = [](const Vec&, const Vec&, int, const Vec& v) { return Vec(2.0 * v); };
  return make_family(std::move(d), 1, 0, 1);
}

/// Diagonal-quadratic objective with affine constraints: the layer subproblem
/// reproduces the problem exactly at rho = 1, so the projection output is
/// independent of where it was linearized.
inline ParametricNlpFamily diag_qp_custom(const Vec& q, const Vec& c0, const Mat& A,
                                          const Vec& b, const Mat& C, const Vec& d_rhs,
                                          double box = 1e3) {
  const auto n = q.size();
  CustomFamilyData d;
  d.f = [q, c0](const Vec&, const Vec& y) {
    return 0.5 * y.dot(q.cwiseProduct(y)) + c0.dot(y);
  };
  d.grad_f = [q, c0](const Vec&, const Vec& y) { return Vec(q.cwiseProduct(y) + c0); };
  d.hess_diag = [q](const Vec&, const Vec&) { return q; };
  d.h = [A, b](const Vec&, const Vec& y) { return Vec(A * y - b); };
  d.jac_h = [A](const Vec&, const Vec&) { return A; };
  d.g = [C, d_rhs](const Vec&, const Vec& y) { return Vec(C * y - d_rhs); };
  d.jac_g = [C](const Vec&, const Vec&) { return C; };
  d.lower = [n, box](const Vec&) { return Vec::Constant(n, -box); };
  d.upper = [n, box](const Vec&) { return Vec::Constant(n, box); };
  d.x_low = Vec::Constant(1, -1.0);
  d.x_high = Vec::Constant(1, 1.0);
  d.lip_grad = q.maxCoeff();
  d.hess_f_vec = [q](const Vec&, const Vec&, const Vec& v) { return Vec(q.cwiseProduct(v)); };
  d.third_diag = [n](const Vec&, const Vec&) { return Vec::Zero(n); };
  return make_family(std::move(d), static_cast<int>(n), static_cast<int>(A.rows()),
                     static_cast<int>(C.rows()));
}

}  // namespace nlproj::testing
