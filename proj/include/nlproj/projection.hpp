#pragma once

/// @file projection.hpp Layered feasibility projection: each layer fits a
/// diagonal quadratic model of the objective and linearizes the constraints
/// at the current point, solves that QP with the primal-dual solver, and
/// feeds the result to the next layer. For affine constraints one layer
/// already lands on the feasible set; curved constraints contract over a few
/// warm-started layers.

#include "nlproj/cp_solver.hpp"
#include "nlproj/family.hpp"

#include <vector>

namespace nlproj {

/// Curvature floor keeping every subproblem strictly convex even where the
/// true diagonal Hessian degenerates or turns negative.
inline constexpr double kCurvatureFloor = 1e-8;

struct ProjectionConfig {
  double rho = 1.0;  ///< curvature weight on the diagonal objective model
  int k = 1;         ///< number of layers
  bool early_stop = false;   ///< stop once the original violation is small
  double feas_tol = 1e-8;    ///< early-stop threshold on max violation
  bool use_equilibration = true;
  bool use_acceleration = false;
  CpParams cp;  ///< inner-solver settings shared by all layers
};

/// Per-layer record kept by project_k: the layer output, the original
/// violation there, the true objective, and the inner iteration count.
struct LayerTrace {
  struct Layer {
    Vec y;
    double violation = 0.0;
    double objective = 0.0;
    int inner_iters = 0;
    bool inner_converged = false;
  };
  std::vector<Layer> layers;
  bool stalled = false;  ///< violation grew on two consecutive layers
};

/// Result of a projection: final primal-dual point, the trace, and the full
/// per-layer fixed points (needed by the reverse-mode pass).
struct ProjectionResult {
  PrimalDualPoint point;
  LayerTrace trace;
  std::vector<PrimalDualPoint> z_layers;
};

/// Builds the layer QP at linearization point y_lin:
///   q = clamp(rho * hess_diag, floor),   c = grad_f - q .* y_lin,
///   A = J_h, b = J_h y_lin - h,          C = J_g, d = J_g y_lin - g,
/// bounds straight from the family. The linear term uses the floored q so
/// the model gradient at y_lin equals the true gradient exactly.
inline QpData build_subproblem(const ParametricNlpFamily& fam, const Vec& x,
                               const Vec& y_lin, double rho) {
  const EvalRecord rec = fam.evaluate(x, y_lin);
  QpData qp;
  qp.q = (rho * rec.hess_diag.array()).max(kCurvatureFloor).matrix();
  qp.c = rec.grad_f - qp.q.cwiseProduct(y_lin);
  qp.A = rec.jac_h;
  qp.b = rec.jac_h * y_lin - rec.h;
  qp.C = rec.jac_g;
  qp.d = rec.jac_g * y_lin - rec.g;
  qp.l = rec.lower;
  qp.u = rec.upper;
  return qp;
}

/// Smallest curvature weight with the guaranteed-descent property
/// rho >= L / min_i hess_diag_i, never below the configured value. Falls
/// back to the configured value (flagged) when no Lipschitz constant is
/// known.
inline double rho_floor(const ParametricNlpFamily& fam, const Vec& x, const Vec& y,
                        double rho_config = 1.0, bool* have_bound = nullptr) {
  const auto L = fam.lipschitz_grad();
  if (!L) {
    if (have_bound != nullptr) *have_bound = false;
    return rho_config;
  }
  if (have_bound != nullptr) *have_bound = true;
  const double min_h = std::max(fam.hess_diag(x, y).minCoeff(), kCurvatureFloor);
  return std::max(rho_config, *L / min_h);
}

namespace detail {

inline SolveReport solve_layer(const QpData& qp, const PrimalDualPoint& warm,
                               const ProjectionConfig& cfg) {
  if (cfg.use_equilibration)
    return solve_qp_preconditioned(qp, warm, cfg.cp, cfg.use_acceleration);
  if (cfg.use_acceleration) return solve_qp_accelerated(qp, warm, cfg.cp);
  return solve_qp(qp, warm, cfg.cp);
}

}  // namespace detail

/// One layer: build the subproblem at z.y, warm-start the inner solver at z,
/// return its primal-dual solution.
inline PrimalDualPoint project_once(const ParametricNlpFamily& fam, const Vec& x,
                                    const PrimalDualPoint& z,
                                    const ProjectionConfig& cfg = {}) {
  const QpData qp = build_subproblem(fam, x, z.y, cfg.rho);
  return detail::solve_layer(qp, z, cfg).point;
}

/// k layers with warm starts, recording the trace. Early stop (when enabled)
/// halts as soon as the original violation is at or below feas_tol.
inline ProjectionResult project_k(const ParametricNlpFamily& fam, const Vec& x,
                                  const PrimalDualPoint& z_hat,
                                  const ProjectionConfig& cfg = {}) {
  ProjectionResult out;
  PrimalDualPoint z = z_hat;
  double prev_violation = std::numeric_limits<double>::infinity();
  int grew = 0;
  for (int layer = 0; layer < cfg.k; ++layer) {
    const QpData qp = build_subproblem(fam, x, z.y, cfg.rho);
    const SolveReport rep = detail::solve_layer(qp, z, cfg);
    z = rep.point;
    out.z_layers.push_back(z);

    LayerTrace::Layer entry;
    entry.y = z.y;
    entry.violation = max_violation(fam.evaluate(x, z.y));
    entry.objective = fam.f(x, z.y);
    entry.inner_iters = rep.iters;
    entry.inner_converged = rep.converged;
    out.trace.layers.push_back(std::move(entry));

    const double v = out.trace.layers.back().violation;
    grew = v > prev_violation ? grew + 1 : 0;
    if (grew >= 2) out.trace.stalled = true;
    prev_violation = v;
    if (cfg.early_stop && v <= cfg.feas_tol) break;
  }
  out.point = std::move(z);
  return out;
}

/// Objective comparison across a projection; slack covers inner-solver
/// tolerance. With rho at or above rho_floor and a feasible start this holds
/// by the majorization argument.
inline bool check_descent(const ParametricNlpFamily& fam, const Vec& x, const Vec& y_before,
                          const Vec& y_after, double slack = 1e-10) {
  return fam.f(x, y_after) <= fam.f(x, y_before) + slack;
}

}  // namespace nlproj
