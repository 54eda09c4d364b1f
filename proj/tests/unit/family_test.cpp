#include "nlproj/family.hpp"
#include "nlproj/instance_gen.hpp"

#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace nlproj;

TEST_CASE("evaluate at simple closed-form points") {
  SUBCASE("half-square objective at zero") {
    const auto fam = testing::pull_to_point_1d(0.0);
    const auto rec = fam.evaluate(Vec::Zero(1), Vec::Zero(1));
    CHECK(rec.f == 0.0);
    CHECK(rec.grad_f[0] == 0.0);
    CHECK(rec.hess_diag[0] == 1.0);
  }
  SUBCASE("exponential objective at zero") {
    CustomFamilyData d;
    d.f = [](const Vec&, const Vec& y) { return std::exp(y[0]); };
    d.grad_f = [](const Vec&, const Vec& y) { return Vec::Constant(1, std::exp(y[0])); };
    d.hess_diag = [](const Vec&, const Vec& y) { return Vec::Constant(1, std::exp(y[0])); };
    d.h = [](const Vec&, const Vec&) { return Vec(0); };
    d.jac_h = [](const Vec&, const Vec&) { return Mat(0, 1); };
    d.g = [](const Vec&, const Vec&) { return Vec(0); };
    d.jac_g = [](const Vec&, const Vec&) { return Mat(0, 1); };
    d.lower = [](const Vec&) { return Vec::Constant(1, -kInf); };
    d.upper = [](const Vec&) { return Vec::Constant(1, kInf); };
    d.x_low = Vec::Constant(1, -1.0);
    d.x_high = Vec::Constant(1, 1.0);
    const auto fam = make_family(std::move(d), 1, 0, 0);
    const auto rec = fam.evaluate(Vec::Zero(1), Vec::Zero(1));
    CHECK(rec.f == doctest::Approx(1.0));
    CHECK(rec.grad_f[0] == doctest::Approx(1.0));
    CHECK(rec.hess_diag[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("nonconvex objective derivatives at a quarter period") {
  // f = 0.5*2*y^2 + sin(y): grad = 2y + cos(y), curvature = 2 - sin(y).
  NonconvexFamilyData d;
  d.q = Vec::Constant(1, 2.0);
  d.p = Vec::Ones(1);
  d.A = Mat::Ones(1, 1);
  d.G = Mat::Zero(0, 1);
  d.h_rhs = Vec(0);
  d.l0 = Vec::Constant(1, -1e3);
  d.u0 = Vec::Constant(1, 1e3);
  d.x_low = Vec::Constant(1, -1.0);
  d.x_high = Vec::Constant(1, 1.0);
  d.A_pinv = Mat::Ones(1, 1);
  d.lip_grad = 3.0;
  const auto fam = make_family(std::move(d));

  const Vec y = Vec::Constant(1, std::acos(-1.0) / 2.0);
  const auto rec = fam.evaluate(Vec::Zero(1), y);
  CHECK(rec.grad_f[0] == doctest::Approx(std::acos(-1.0)).epsilon(1e-12));
  CHECK(rec.hess_diag[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate is pure") {
  GenDims dims;
  dims.n_vars = 5;
  dims.n_eq = 2;
  dims.n_ineq = 3;
  dims.n_params = 2;
  const auto fam = generate_convex_nlp_family(dims, 21);
  Rng rng(4);
  const Vec x = rng.uniform_vec(2, -5.0, 5.0);
  const Vec y = rng.normal_vec(5);
  const auto r1 = fam.evaluate(x, y);
  const auto r2 = fam.evaluate(x, y);
  CHECK(r1.f == r2.f);
  CHECK((r1.grad_f - r2.grad_f).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((r1.jac_h - r2.jac_h).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((r1.jac_g - r2.jac_g).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("analytic derivatives of every built-in kind pass the probe check") {
  GenDims dims;
  dims.n_vars = 6;
  dims.n_eq = 2;
  dims.n_ineq = 4;
  dims.n_params = 3;
  for (const auto kind : {FamilyKind::kQp, FamilyKind::kQcqp, FamilyKind::kConvexNlp,
                          FamilyKind::kNonconvex}) {
    CAPTURE(to_string(kind));
    const auto fam = generate_family(kind, dims, 31);
    CHECK(fam.validate(0, 100).empty());
  }
}

TEST_CASE("validation reports structural problems") {
  SUBCASE("too many equalities") {
    NonconvexFamilyData d;
    d.q = Vec::Ones(1);
    d.p = Vec::Ones(1);
    d.A = Mat::Ones(2, 1);
    d.G = Mat::Zero(0, 1);
    d.h_rhs = Vec(0);
    d.l0 = Vec::Constant(1, -1.0);
    d.u0 = Vec::Constant(1, 1.0);
    d.x_low = Vec::Constant(2, -1.0);
    d.x_high = Vec::Constant(2, 1.0);
    d.A_pinv = Mat::Ones(1, 2);
    const auto fam = make_family(std::move(d));
    const auto issues = fam.validate(0, 2);
    REQUIRE(!issues.empty());
    CHECK(issues.front() == "n_eq exceeds n_vars");
  }
  SUBCASE("wrong jacobian caught by finite differences") {
    auto broken = testing::parabola_cut_1d();
    auto& d = std::get<CustomFamilyData>(broken.data);
    d.jac_g = [](const Vec&, const Vec& y) { return Mat::Constant(1, 1, 3.0 * y[0]); };
    const auto issues = broken.validate(0, 20);
    REQUIRE(!issues.empty());
    CHECK(issues.front().find("jac_g") != std::string::npos);
  }
}

TEST_CASE("evaluate rejects non-finite data and bad shapes") {
  auto fam = testing::pull_to_point_1d(0.0);
  auto& d = std::get<CustomFamilyData>(fam.data);
  d.f = [](const Vec&, const Vec&) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(fam.evaluate(Vec::Zero(1), Vec::Zero(1)), NonFiniteError);
  CHECK_THROWS_AS(fam.evaluate(Vec::Zero(2), Vec::Zero(1)), DimensionError);
}

TEST_CASE("out-of-box parameters are flagged, not rejected") {
  const auto fam = testing::pull_to_point_1d(0.0);
  const auto inside = fam.evaluate(Vec::Constant(1, 0.5), Vec::Zero(1));
  CHECK(inside.x_in_box);
  const auto outside = fam.evaluate(Vec::Constant(1, 7.0), Vec::Zero(1));
  CHECK(!outside.x_in_box);
}
