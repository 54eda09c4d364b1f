#include "nlproj/precondition.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlproj;

namespace {

QpData one_var_qp(double a, double b) {
  QpData qp;
  qp.q = Vec::Zero(1);
  qp.c = Vec::Zero(1);
  qp.A = Mat::Constant(1, 1, a);
  qp.b = Vec::Constant(1, b);
  qp.C = Mat::Zero(0, 1);
  qp.d = Vec(0);
  qp.l = Vec::Constant(1, -kInf);
  qp.u = Vec::Constant(1, kInf);
  return qp;
}

}  // namespace

TEST_CASE("spectral norm of a diagonal stack is the largest column") {
  Mat A(1, 2), C(1, 2);
  A << 3, 0;
  C << 0, 4;
  CHECK(estimate_spectral_norm(A, C) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("spectral norm with one empty block") {
  const Mat A(0, 1);
  const Mat C = Mat::Ones(1, 1);
  CHECK(estimate_spectral_norm(A, C) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spectral norm matches dense SVD on random stacks") {
  Rng rng(12);
  for (int t = 0; t < 25; ++t) {
    const Mat A = rng.normal_mat(3, 4);
    const Mat C = rng.normal_mat(3, 4);
    Mat K(6, 4);
    K << A, C;
    const double exact = K.jacobiSvd().singularValues()[0];
    PowerIterParams p;
    p.n_iters = 300;
    p.seed = static_cast<std::uint64_t>(t);
    const double est = estimate_spectral_norm(A, C, p);
    CHECK(std::abs(est - exact) / exact <= 1e-6);
  }
}

TEST_CASE("zero sweeps leave the problem untouched") {
  QpData qp = one_var_qp(4.0, 4.0);
  RuizParams p;
  p.n_iters = 0;
  const auto rec = ruiz_equilibrate(qp, p);
  CHECK(qp.A(0, 0) == 4.0);
  CHECK(rec.col[0] == 1.0);
  CHECK(rec.row_eq[0] == 1.0);
}

TEST_CASE("single sweep on a one-variable equality row") {
  QpData qp = one_var_qp(4.0, 4.0);
  RuizParams p;
  p.n_iters = 1;
  const auto rec = ruiz_equilibrate(qp, p);
  // Column factor 1/2 takes the entry to 2, then the row factor 1/sqrt(2)
  // lands on sqrt(2); the right side follows the row factor only.
  CHECK(qp.A(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(qp.b[0] == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(rec.col[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rec.row_eq[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("infinite bounds survive equilibration") {
  QpData qp = one_var_qp(4.0, 4.0);
  const auto rec = ruiz_equilibrate(qp);
  CHECK(qp.l[0] == -kInf);
  CHECK(qp.u[0] == kInf);
  CHECK(rec.col.minCoeff() > 0.0);
}

TEST_CASE("ten sweeps tame an ill-conditioned stack") {
  Rng rng(77);
  QpData qp;
  const int n = 6, m_eq = 3, m_ineq = 4;
  // Zero curvature keeps the column maxima driven by the stack alone.
  qp.q = Vec::Zero(n);
  qp.c = rng.normal_vec(n);
  qp.A = rng.normal_mat(m_eq, n);
  qp.C = rng.normal_mat(m_ineq, n);
  for (int i = 0; i < m_eq; ++i) qp.A.row(i) *= std::pow(10.0, -3 + 2 * i);
  for (int i = 0; i < m_ineq; ++i) qp.C.row(i) *= std::pow(10.0, 3 - 2 * i);
  qp.b = rng.normal_vec(m_eq);
  qp.d = rng.normal_vec(m_ineq);
  qp.l = Vec::Constant(n, -10.0);
  qp.u = Vec::Constant(n, 10.0);

  ruiz_equilibrate(qp);
  Mat K(m_eq + m_ineq, n);
  K << qp.A, qp.C;
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    const double rmax = K.row(i).cwiseAbs().maxCoeff();
    CHECK(rmax >= 0.5);
    CHECK(rmax <= 2.0);
  }
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    const double cmax = K.col(j).cwiseAbs().maxCoeff();
    CHECK(cmax >= 0.5);
    CHECK(cmax <= 2.0);
  }
}

TEST_CASE("scaled objective agrees with the original through the scaling") {
  Rng rng(5);
  const int n = 5;
  QpData qp;
  qp.q = rng.uniform_vec(n, 0.5, 4.0);
  qp.c = rng.normal_vec(n);
  qp.A = rng.normal_mat(2, n);
  qp.b = rng.normal_vec(2);
  qp.C = rng.normal_mat(2, n);
  qp.d = rng.normal_vec(2);
  qp.l = Vec::Constant(n, -10.0);
  qp.u = Vec::Constant(n, 10.0);
  const QpData original = qp;

  const auto rec = ruiz_equilibrate(qp);
  const Vec y = rng.uniform_vec(n, -2.0, 2.0);
  const Vec y_s = y.cwiseQuotient(rec.col);
  CHECK(qp.objective(y_s) == doctest::Approx(original.objective(y)).epsilon(1e-10));
}

TEST_CASE("unscale maps blocks by their diagonal factors") {
  ScalingRecord rec;
  rec.col = Vec::Constant(1, 2.0);
  rec.row_eq = Vec::Constant(1, 3.0);
  rec.row_ineq = Vec(0);
  PrimalDualPoint pt = PrimalDualPoint::Zero(1, 1, 0);
  pt.y << 3.0;
  pt.lam << 1.5;
  const auto out = unscale_solution(pt, rec);
  CHECK(out.y[0] == 6.0);
  CHECK(out.lam[0] == 4.5);

  // Identity scaling keeps the point as is.
  ScalingRecord id;
  id.col = Vec::Ones(1);
  id.row_eq = Vec::Ones(1);
  id.row_ineq = Vec(0);
  const auto same = unscale_solution(pt, id);
  CHECK(same.y[0] == pt.y[0]);
  CHECK(same.lam[0] == pt.lam[0]);
}

TEST_CASE("scale and unscale are inverse") {
  Rng rng(9);
  ScalingRecord rec;
  rec.col = rng.uniform_vec(4, 0.1, 3.0);
  rec.row_eq = rng.uniform_vec(2, 0.1, 3.0);
  rec.row_ineq = rng.uniform_vec(3, 0.1, 3.0);
  PrimalDualPoint pt = PrimalDualPoint::Zero(4, 2, 3);
  pt.y = rng.normal_vec(4);
  pt.lam = rng.normal_vec(2);
  pt.mu = rng.uniform_vec(3, 0.0, 2.0);
  const auto round = unscale_solution(scale_solution(pt, rec), rec);
  CHECK((round.y - pt.y).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK((round.lam - pt.lam).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK((round.mu - pt.mu).lpNorm<Eigen::Infinity>() <= 1e-15);
}
