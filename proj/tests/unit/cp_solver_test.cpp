#include "nlproj/cp_solver.hpp"

#include "nlproj/instance_gen.hpp"
#include "nlproj/oracle.hpp"
#include "nlproj/projection.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlproj;

namespace {

QpData box_only_qp(double q, double c, double lo, double hi) {
  QpData qp;
  qp.q = Vec::Constant(1, q);
  qp.c = Vec::Constant(1, c);
  qp.A = Mat(0, 1);
  qp.b = Vec(0);
  qp.C = Mat(0, 1);
  qp.d = Vec(0);
  qp.l = Vec::Constant(1, lo);
  qp.u = Vec::Constant(1, hi);
  return qp;
}

QpData symmetric_eq_qp() {
  QpData qp;
  qp.q = Vec::Ones(2);
  qp.c = Vec::Zero(2);
  qp.A = Mat::Ones(1, 2);
  qp.b = Vec::Constant(1, 2.0);
  qp.C = Mat(0, 2);
  qp.d = Vec(0);
  qp.l = Vec::Constant(2, -10.0);
  qp.u = Vec::Constant(2, 10.0);
  return qp;
}

/// Random feasible diagonal-curvature QP, built by linearizing a generated
/// family near its witness so every constraint block is populated and
/// consistent.
QpData random_feasible_qp(std::uint64_t seed, int n, int m_eq, int m_ineq) {
  GenDims dims;
  dims.n_vars = n;
  dims.n_eq = m_eq;
  dims.n_ineq = m_ineq;
  dims.n_params = 2;
  const auto fam = generate_qp_family(dims, seed);
  const auto xs = sample_parameters(fam, 1, derive_seed(seed, 5));
  Rng rng(derive_seed(seed, 6));
  const Vec y_lin = *fam.feasible_point(xs[0]) + 0.5 * rng.normal_vec(n);
  return build_subproblem(fam, xs[0], y_lin, 1.0);
}

}  // namespace

TEST_CASE("one iteration reproduces the hand-computed prox update") {
  const QpData qp = box_only_qp(1.0, -1.0, -10.0, 10.0);
  CpState st;
  st.y = Vec::Zero(1);
  st.y_bar = Vec::Zero(1);
  st.lam = Vec(0);
  st.mu = Vec(0);
  const CpState next = cp_step(st, qp, 0.5, 0.5);
  // prox input 0 - 0.5*(-1) = 0.5, scaled by 1/(1+0.5) to 1/3; extrapolation
  // doubles the move.
  CHECK(next.y[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(next.y_bar[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("dual updates ascend at the extrapolated point") {
  SUBCASE("equality multiplier moves by sigma times the residual") {
    QpData qp = box_only_qp(1.0, 0.0, -10.0, 10.0);
    qp.A = Mat::Ones(1, 1);
    qp.b = Vec::Ones(1);
    CpState st;
    st.y = Vec::Zero(1);
    st.y_bar = Vec::Constant(1, 2.0);
    st.lam = Vec::Zero(1);
    st.mu = Vec(0);
    CHECK(cp_step(st, qp, 0.1, 1.0).lam[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("inequality multiplier clamps at zero") {
    QpData qp = box_only_qp(1.0, 0.0, -10.0, 10.0);
    qp.C = Mat::Ones(1, 1);
    qp.d = Vec::Ones(1);
    CpState st;
    st.y = Vec::Zero(1);
    st.y_bar = Vec::Zero(1);
    st.lam = Vec(0);
    st.mu = Vec::Zero(1);
    CHECK(cp_step(st, qp, 0.1, 1.0).mu[0] == 0.0);
  }
}

TEST_CASE("residuals at closed-form points") {
  const QpData qp = symmetric_eq_qp();
  PrimalDualPoint pt = PrimalDualPoint::Zero(2, 1, 0);
  pt.y << 1.0, 1.0;
  pt.lam << -1.0;
  const auto r = residuals(qp, pt);
  CHECK(r.prim_inf == 0.0);
  CHECK(r.gap == 0.0);
  CHECK(std::isnan(r.dual_inf));

  QpData qpi = box_only_qp(1.0, 0.0, -10.0, 10.0);
  qpi.C = Mat::Ones(1, 1);
  qpi.d = Vec::Constant(1, -0.3);
  PrimalDualPoint vi = PrimalDualPoint::Zero(1, 0, 1);
  const auto ri = residuals(qpi, vi);
  CHECK(ri.prim_inf == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ri.gap == 0.0);
}

TEST_CASE("step-size rule covers both curvature regimes") {
  double tau = 0.0, sigma = 0.0;
  choose_step_sizes(0.01, 2.0, tau, sigma);
  CHECK(tau == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(sigma == doctest::Approx(0.45).epsilon(1e-15));

  choose_step_sizes(10.0, 1.0, tau, sigma);
  CHECK(tau == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
  CHECK(sigma == doctest::Approx(0.99 * 11.0).epsilon(1e-14));
  // The reported admissibility flag holds for the curvature-heavy branch.
  CHECK(step_condition_holds(tau, sigma, 10.0, 1.0));
}

TEST_CASE("clipped scalar problem lands on the bound") {
  const QpData qp = box_only_qp(1.0, -1.0, 0.0, 0.4);
  const auto rep = solve_qp(qp, PrimalDualPoint::Zero(1, 0, 0), CpParams{});
  CHECK(rep.converged);
  CHECK(rep.point.y[0] == doctest::Approx(0.4).epsilon(1e-9));

  PrimalDualPoint pt = rep.point;
  recover_bound_multipliers(qp, pt);
  CHECK(pt.alpha[0] == 0.0);
  CHECK(pt.beta[0] == doctest::Approx(0.6).epsilon(1e-8));
}

TEST_CASE("symmetric equality problem splits evenly") {
  const auto rep = solve_qp(symmetric_eq_qp(), PrimalDualPoint::Zero(2, 1, 0), CpParams{});
  CHECK(rep.converged);
  CHECK(rep.point.y[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rep.point.y[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rep.point.lam[0] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("interior solutions recover zero bound multipliers") {
  const QpData qp = box_only_qp(1.0, -1.0, -10.0, 10.0);
  auto rep = solve_qp(qp, PrimalDualPoint::Zero(1, 0, 0), CpParams{});
  recover_bound_multipliers(qp, rep.point);
  CHECK(rep.point.alpha[0] == 0.0);
  CHECK(rep.point.beta[0] == 0.0);
}

TEST_CASE("recovered bound multipliers close the stationarity residual") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    QpData qp = random_feasible_qp(seed, 6, 2, 3);
    // Tighten the box so several bounds go active.
    Rng rng(derive_seed(seed, 7));
    const Vec mid = 0.5 * (qp.l + qp.u);
    qp.l = mid - Vec::Constant(6, 0.3);
    qp.u = mid + Vec::Constant(6, 0.3);
    auto rep = solve_qp(qp, PrimalDualPoint::Zero(6, 2, 3), CpParams{});
    REQUIRE(rep.converged);
    recover_bound_multipliers(qp, rep.point);
    const auto r = residuals(qp, rep.point);
    CHECK(r.dual_inf <= 1e-6);
  }
}

TEST_CASE("every iterate respects the box and the dual cone") {
  QpData qp = random_feasible_qp(11, 5, 2, 3);
  Rng rng(31);
  CpState st;
  st.y = rng.normal_vec(5).cwiseMax(qp.l).cwiseMin(qp.u);
  st.y_bar = st.y;
  st.lam = rng.normal_vec(2);
  st.mu = rng.uniform_vec(3, 0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    st = cp_step(st, qp, 0.05, 0.05);
    CHECK((st.y.array() >= qp.l.array()).all());
    CHECK((st.y.array() <= qp.u.array()).all());
    CHECK(st.mu.minCoeff() >= 0.0);
  }
}

TEST_CASE("primal solution matches the enumeration reference") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QpData qp = random_feasible_qp(seed, 8, 3, 3);
    const auto cp = solve_qp(qp, PrimalDualPoint::Zero(8, 3, 3), CpParams{});
    REQUIRE(cp.converged);
    const auto ref = solve_qp_active_set(qp);
    CAPTURE(seed);
    CHECK((cp.point.y - ref.point.y).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(std::abs(cp.objective - ref.objective) <= 1e-8);
  }
}

TEST_CASE("solution does not depend on the starting point") {
  const QpData qp = random_feasible_qp(42, 6, 2, 3);
  Rng rng(13);
  PrimalDualPoint a = PrimalDualPoint::Zero(6, 2, 3);
  a.y = rng.normal_vec(6);
  PrimalDualPoint b = PrimalDualPoint::Zero(6, 2, 3);
  b.y = 5.0 * rng.normal_vec(6);
  b.lam = rng.normal_vec(2);
  const auto ra = solve_qp(qp, a, CpParams{});
  const auto rb = solve_qp(qp, b, CpParams{});
  REQUIRE(ra.converged);
  REQUIRE(rb.converged);
  CHECK((ra.point.y - rb.point.y).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("iteration cap returns the best effort unconverged") {
  const QpData qp = random_feasible_qp(4, 6, 2, 3);
  CpParams p;
  p.max_iters = 3;
  const auto rep = solve_qp(qp, PrimalDualPoint::Zero(6, 2, 3), p);
  CHECK(!rep.converged);
  CHECK(rep.iters == 3);
  CHECK(rep.point.y.allFinite());
}

TEST_CASE("acceleration with zero modulus reduces to the plain iteration") {
  QpData qp = random_feasible_qp(9, 5, 2, 2);
  qp.q[2] = 0.0;
  const auto plain = solve_qp(qp, PrimalDualPoint::Zero(5, 2, 2), CpParams{});
  const auto accel = solve_qp_accelerated(qp, PrimalDualPoint::Zero(5, 2, 2), CpParams{});
  CHECK(accel.gamma == 0.0);
  CHECK(accel.iters == plain.iters);
  CHECK((accel.point.y - plain.point.y).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("accelerated schedule reaches the same solution") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QpData qp = random_feasible_qp(seed + 100, 6, 2, 3);
    const auto plain = solve_qp(qp, PrimalDualPoint::Zero(6, 2, 3), CpParams{});
    const auto accel = solve_qp_accelerated(qp, PrimalDualPoint::Zero(6, 2, 3), CpParams{});
    REQUIRE(plain.converged);
    REQUIRE(accel.converged);
    CHECK(accel.gamma > 0.0);
    CHECK((accel.point.y - plain.point.y).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("equilibrated solve agrees with the direct one") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const QpData qp = random_feasible_qp(seed + 50, 7, 3, 4);
    const auto direct = solve_qp(qp, PrimalDualPoint::Zero(7, 3, 4), CpParams{});
    const auto scaled = solve_qp_preconditioned(qp, PrimalDualPoint::Zero(7, 3, 4),
                                                CpParams{});
    REQUIRE(direct.converged);
    REQUIRE(scaled.converged);
    CHECK(scaled.used_scaling);
    CHECK((scaled.point.y - direct.point.y).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK((scaled.point.y.array() >= qp.l.array()).all());
    CHECK((scaled.point.y.array() <= qp.u.array()).all());
  }
}
