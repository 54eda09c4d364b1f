#pragma once

/// @file bench.hpp End-to-end benchmark: generate a family, train the
/// backbone, evaluate held-out parameters against the reference solver, and
/// emit a deterministic metrics report. Wall-clock numbers go to a separate
/// report so the metrics file is byte-stable under a fixed seed.

#include "nlproj/instance_gen.hpp"
#include "nlproj/metrics.hpp"
#include "nlproj/oracle.hpp"
#include "nlproj/serialize.hpp"
#include "nlproj/trainer.hpp"

#include <chrono>
#include <numeric>
#include <string>
#include <vector>

namespace nlproj {

struct BenchConfig {
  FamilyKind kind = FamilyKind::kQp;
  GenDims dims;
  GenOptions gen;
  int n_instances = 200;
  std::uint64_t seed = 0;
  TrainConfig train;
  /// Pass thresholds applied to the held-out evaluation.
  double max_aog_percent = 1.0;
  double max_violation = 1e-8;
  double min_agreement = 0.0;
};

struct BenchResult {
  TrainResult train;
  double aog = std::numeric_limits<double>::quiet_NaN();
  ViolationSummary violations;
  double agreement = std::numeric_limits<double>::quiet_NaN();
  bool passed = false;
  Json metrics;
  Json timing;
};

/// Evaluate a trained model on the given parameter subset: objective gap
/// against the reference solver, violation summary of the projected outputs,
/// and active-set agreement on the inequality multipliers.
inline void evaluate_model(const ParametricNlpFamily& fam, const Backbone& model,
                           const std::vector<Vec>& xs, const std::vector<int>& idx,
                           const ProjectionConfig& proj, BenchResult& out) {
  std::vector<double> model_obj, ref_obj;
  std::vector<Vec> h_batch, g_batch, mu_model, mu_ref;
  for (int i : idx) {
    const Vec& x = xs[static_cast<std::size_t>(i)];
    const ProjectionResult res = infer(model, fam, x, proj);
    const auto ref = solve_nlp_reference(fam, x);
    model_obj.push_back(fam.f(x, res.point.y));
    ref_obj.push_back(ref.objective);
    h_batch.push_back(fam.h(x, res.point.y));
    g_batch.push_back(fam.g(x, res.point.y));
    mu_model.push_back(res.point.mu);
    mu_ref.push_back(ref.point.mu);
  }
  out.aog = average_optimality_gap(model_obj, ref_obj);
  out.violations = compute_violations(h_batch, g_batch);
  out.agreement = active_set_agreement(mu_model, mu_ref);
}

inline BenchResult run_benchmark(const BenchConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  BenchResult out;

  const auto t0 = Clock::now();
  const ParametricNlpFamily fam = generate_family(cfg.kind, cfg.dims, cfg.seed, cfg.gen);
  const std::vector<Vec> xs = sample_parameters(fam, cfg.n_instances, derive_seed(cfg.seed, 1));
  out.train = train_backbone(fam, xs, cfg.train);
  const auto t1 = Clock::now();

  evaluate_model(fam, out.train.model, xs, out.train.test_idx, cfg.train.projection, out);
  const auto t2 = Clock::now();

  const double worst_violation = std::max(out.violations.max_eq, out.violations.max_ineq);
  out.passed = out.aog <= cfg.max_aog_percent && worst_violation <= cfg.max_violation &&
               out.agreement >= cfg.min_agreement;

  Json m;
  m["family"] = to_string(cfg.kind);
  m["n_vars"] = cfg.dims.n_vars;
  m["n_eq"] = cfg.dims.n_eq;
  m["n_ineq"] = cfg.dims.n_ineq;
  m["n_params"] = cfg.dims.n_params;
  m["n_instances"] = cfg.n_instances;
  m["seed"] = cfg.seed;
  m["n_train"] = out.train.train_idx.size();
  m["n_test"] = out.train.test_idx.size();
  m["epochs_run"] = out.train.history.empty() ? 0 : out.train.history.back().epoch + 1;
  m["final_loss"] = encode_scalar(out.train.history.empty()
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : out.train.history.back().loss.total);
  m["aog_percent"] = encode_scalar(out.aog);
  m["max_eq_violation"] = encode_scalar(out.violations.max_eq);
  m["mean_eq_violation"] = encode_scalar(out.violations.mean_eq);
  m["max_ineq_violation"] = encode_scalar(out.violations.max_ineq);
  m["mean_ineq_violation"] = encode_scalar(out.violations.mean_ineq);
  m["active_set_agreement"] = encode_scalar(out.agreement);
  m["passed"] = out.passed;
  out.metrics = std::move(m);

  const auto secs = [](auto a, auto b) {
    return std::chrono::duration<double>(b - a).count();
  };
  Json t;
  t["train_seconds"] = secs(t0, t1);
  t["eval_seconds"] = secs(t1, t2);
  t["total_seconds"] = secs(t0, t2);
  out.timing = std::move(t);
  return out;
}

}  // namespace nlproj
