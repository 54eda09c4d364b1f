#include "nlproj/nlproj.hpp"

#include <doctest.h>

using namespace nlproj;

TEST_CASE("library smoke: generate, solve, project round trip") {
  GenDims dims;
  dims.n_vars = 6;
  dims.n_eq = 2;
  dims.n_ineq = 3;
  dims.n_params = 2;
  const auto fam = generate_qp_family(dims, 7);
  const auto xs = sample_parameters(fam, 3, 7);
  const auto ref = solve_nlp_reference(fam, xs[0]);
  CHECK(ref.converged);

  PrimalDualPoint z = PrimalDualPoint::Zero(fam.n_vars, fam.n_eq, fam.n_ineq);
  z.y = *fam.feasible_point(xs[0]);
  const auto res = project_k(fam, xs[0], z, ProjectionConfig{});
  CHECK(max_violation(fam.evaluate(xs[0], res.point.y)) <= 1e-7);
}
