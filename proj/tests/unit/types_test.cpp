#include "nlproj/types.hpp"

#include <doctest.h>

using namespace nlproj;

namespace {

QpData small_qp() {
  QpData qp;
  qp.q = Vec::Constant(2, 1.0);
  qp.c = Vec::Zero(2);
  qp.A = Mat::Ones(1, 2);
  qp.b = Vec::Constant(1, 2.0);
  qp.C = Mat::Zero(0, 2);
  qp.d = Vec(0);
  qp.l = Vec::Constant(2, -10.0);
  qp.u = Vec::Constant(2, 10.0);
  return qp;
}

}  // namespace

TEST_CASE("qp objective is the diagonal quadratic form") {
  QpData qp = small_qp();
  qp.c << 1.0, -1.0;
  Vec y(2);
  y << 2.0, 3.0;
  // 0.5*(4+9) + (2-3) = 6.5 - 1
  CHECK(qp.objective(y) == doctest::Approx(5.5).epsilon(1e-15));
}

TEST_CASE("qp validation flags bad shapes and data") {
  QpData qp = small_qp();
  CHECK_NOTHROW(qp.validate());

  SUBCASE("negative curvature rejected") {
    qp.q[0] = -1.0;
    CHECK_THROWS_AS(qp.validate(), DimensionError);
  }
  SUBCASE("crossed bounds rejected") {
    qp.l[1] = 11.0;
    CHECK_THROWS_AS(qp.validate(), DimensionError);
  }
  SUBCASE("row count mismatch rejected") {
    qp.b = Vec::Zero(2);
    CHECK_THROWS_AS(qp.validate(), DimensionError);
  }
  SUBCASE("column mismatch rejected") {
    qp.A = Mat::Ones(1, 3);
    CHECK_THROWS_AS(qp.validate(), DimensionError);
  }
}

TEST_CASE("primal-dual point stacks and unstacks losslessly") {
  PrimalDualPoint pt = PrimalDualPoint::Zero(3, 2, 1);
  pt.y << 1, 2, 3;
  pt.lam << -4, 5;
  pt.mu << 6;
  const Vec z = pt.stacked();
  REQUIRE(z.size() == 6);
  CHECK(z[0] == 1);
  CHECK(z[4] == 5);
  const PrimalDualPoint back = PrimalDualPoint::from_stacked(z, 3, 2, 1);
  CHECK((back.y - pt.y).norm() == 0.0);
  CHECK((back.lam - pt.lam).norm() == 0.0);
  CHECK((back.mu - pt.mu).norm() == 0.0);
}

TEST_CASE("positive-part norm ignores satisfied rows") {
  Vec g(3);
  g << -1.0, 0.3, -0.2;
  CHECK(pos_part_inf_norm(g) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(pos_part_inf_norm(Vec::Constant(2, -5.0)) == 0.0);
  CHECK(pos_part_inf_norm(Vec(0)) == 0.0);
}

TEST_CASE("record violation is the worst of |h| and positive g") {
  EvalRecord rec;
  rec.h = Vec::Constant(1, -0.4);
  rec.g = Vec::Constant(1, 0.1);
  CHECK(max_violation(rec) == doctest::Approx(0.4).epsilon(1e-15));
  rec.g[0] = 0.9;
  CHECK(max_violation(rec) == doctest::Approx(0.9).epsilon(1e-15));
}
