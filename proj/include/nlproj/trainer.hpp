#pragma once

/// @file trainer.hpp Training loop for the parameter-to-solution backbone:
/// predict a primal-dual point, project it through the layered solver,
/// penalize the projected point's Lagrangian terms plus a prediction
/// consistency term, and backpropagate with the implicit-adjoint VJP.

#include "nlproj/adjoint.hpp"
#include "nlproj/metrics.hpp"
#include "nlproj/mlp.hpp"
#include "nlproj/oracle.hpp"
#include "nlproj/projection.hpp"

#include <vector>

namespace nlproj {

struct LossConfig {
  double alpha = 10.0;  ///< weight of the consistency term
  /// Equality term as stated is the square of the scalar lam'h; the switch
  /// selects the summed per-row variant sum_i (lam_i h_i)^2 instead.
  bool sum_squared_eq = false;
  int m_override = 0;  ///< normalizer M; 0 means dim(z)
};

struct LossTerms {
  double total = 0.0;
  double f_term = 0.0;
  double eq_term = 0.0;
  double ineq_term = 0.0;
  double consistency = 0.0;
};

namespace detail {

inline double loss_normalizer(const ParametricNlpFamily& fam, const LossConfig& cfg) {
  if (cfg.m_override > 0) return static_cast<double>(cfg.m_override);
  return static_cast<double>(fam.n_vars + fam.n_eq + fam.n_ineq);
}

}  // namespace detail

/// Training loss at one instance:
///   f(y~) + eq(lam~, h) + mu~'relu(g) + (alpha/M) ||z^ - z~||^2,
/// evaluated at the projected point z~ with prediction z^.
inline LossTerms training_loss(const ParametricNlpFamily& fam, const Vec& x,
                               const PrimalDualPoint& z_hat, const PrimalDualPoint& z_tilde,
                               const LossConfig& cfg = {}) {
  const EvalRecord rec = fam.evaluate(x, z_tilde.y);
  LossTerms t;
  t.f_term = rec.f;
  if (fam.n_eq > 0) {
    if (cfg.sum_squared_eq) {
      const Vec lh = z_tilde.lam.cwiseProduct(rec.h);
      t.eq_term = lh.squaredNorm();
    } else {
      const double lh = z_tilde.lam.dot(rec.h);
      t.eq_term = lh * lh;
    }
  }
  for (int i = 0; i < fam.n_ineq; ++i)
    t.ineq_term += z_tilde.mu[i] * std::max(rec.g[i], 0.0);
  const double M = detail::loss_normalizer(fam, cfg);
  t.consistency =
      cfg.alpha / M * (z_hat.stacked() - z_tilde.stacked()).squaredNorm();
  t.total = t.f_term + t.eq_term + t.ineq_term + t.consistency;
  return t;
}

/// Analytic partials of the loss: cotangent on z~ (to route through the
/// projection VJP) and the direct cotangent on z^.
inline void training_loss_gradients(const ParametricNlpFamily& fam, const Vec& x,
                                    const PrimalDualPoint& z_hat,
                                    const PrimalDualPoint& z_tilde, const LossConfig& cfg,
                                    Vec& g_ztilde, Vec& g_zhat_direct) {
  const EvalRecord rec = fam.evaluate(x, z_tilde.y);
  const double M = detail::loss_normalizer(fam, cfg);
  const Vec diff = z_hat.stacked() - z_tilde.stacked();

  Vec gy = rec.grad_f;
  Vec glam = Vec::Zero(fam.n_eq);
  if (fam.n_eq > 0) {
    if (cfg.sum_squared_eq) {
      const Vec lh = z_tilde.lam.cwiseProduct(rec.h);
      gy.noalias() += rec.jac_h.transpose() * (2.0 * lh.cwiseProduct(z_tilde.lam));
      glam = 2.0 * lh.cwiseProduct(rec.h);
    } else {
      const double lh = z_tilde.lam.dot(rec.h);
      gy.noalias() += rec.jac_h.transpose() * (2.0 * lh * z_tilde.lam);
      glam = 2.0 * lh * rec.h;
    }
  }
  Vec gmu = Vec::Zero(fam.n_ineq);
  if (fam.n_ineq > 0) {
    Vec gate = Vec::Zero(fam.n_ineq);
    for (int i = 0; i < fam.n_ineq; ++i) {
      gmu[i] = std::max(rec.g[i], 0.0);
      if (rec.g[i] > 0.0) gate[i] = z_tilde.mu[i];
    }
    gy.noalias() += rec.jac_g.transpose() * gate;
  }

  g_ztilde = Vec(diff.size());
  g_ztilde << gy, glam, gmu;
  g_ztilde -= 2.0 * cfg.alpha / M * diff;
  g_zhat_direct = 2.0 * cfg.alpha / M * diff;
}

struct TrainConfig {
  std::vector<int> hidden;  ///< empty means two hidden layers of 4*n_vars
  int epochs = 500;
  int batch_size = 0;  ///< 0 = full batch
  double split = 0.8;  ///< train fraction of the dataset
  int eval_every = 25;
  std::uint64_t seed = 0;
  AdamConfig adam;
  LossConfig loss;
  ProjectionConfig projection;
  AdjointParams adjoint;
  bool last_layer_only = false;
  /// Optional plateau target: stop once the probe AOG (percent) falls to
  /// this level with feasible projections. <= 0 disables.
  double target_aog = 0.0;
};

struct HistoryRow {
  int epoch = 0;
  LossTerms loss;
  double aog = std::numeric_limits<double>::quiet_NaN();
  double max_violation = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  Backbone model;
  std::vector<HistoryRow> history;
  std::vector<int> train_idx, test_idx;
};

/// Per-instance gradient of the full pipeline: runs the projection forward,
/// combines the direct and projected loss paths, and backpropagates into the
/// network. Returns the loss terms; the projection result is exposed for
/// metric reuse.
inline LossTerms backbone_instance_gradient(const ParametricNlpFamily& fam, const Vec& x,
                                            const Backbone& model, const TrainConfig& cfg,
                                            MlpGrads& grads, ProjectionResult* forward_out
                                            = nullptr) {
  const MlpTape tape = mlp_forward_tape(model.net, x);
  const PrimalDualPoint z_hat = model.split(tape.output);
  const ProjectionResult forward = project_k(fam, x, z_hat, cfg.projection);
  const LossTerms terms = training_loss(fam, x, z_hat, forward.point, cfg.loss);

  Vec g_ztilde, g_zhat;
  training_loss_gradients(fam, x, z_hat, forward.point, cfg.loss, g_ztilde, g_zhat);
  g_zhat += vjp_projection(fam, x, z_hat, forward, g_ztilde, cfg.projection, cfg.adjoint,
                           cfg.last_layer_only);
  mlp_backward(model.net, tape, model.head_backward(tape.output, g_zhat), grads);

  if (forward_out != nullptr) *forward_out = forward;
  return terms;
}

/// Trains the backbone on parameter samples from one family. The dataset is
/// shuffled once (seeded), split train/test, and optimized full-batch (or in
/// deterministic minibatches). Probe metrics (AOG against the sequential
/// reference, max violation) are evaluated every eval_every epochs on up to
/// 20 held-out instances.
inline TrainResult train_backbone(const ParametricNlpFamily& fam, const std::vector<Vec>& xs,
                                  const TrainConfig& cfg) {
  require(!xs.empty(), "train_backbone: empty dataset");
  TrainResult out;

  std::vector<int> order(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) order[i] = static_cast<int>(i);
  Rng shuffle_rng(derive_seed(cfg.seed, 0xda7aULL));
  for (size_t i = xs.size(); i > 1; --i)
    std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
  const size_t n_train = std::max<size_t>(
      1, static_cast<size_t>(cfg.split * static_cast<double>(xs.size())));
  out.train_idx.assign(order.begin(), order.begin() + n_train);
  out.test_idx.assign(order.begin() + n_train, order.end());

  std::vector<int> hidden = cfg.hidden;
  if (hidden.empty()) hidden = {4 * fam.n_vars, 4 * fam.n_vars};
  Backbone model =
      Backbone::init(fam.n_params, fam.n_vars, fam.n_eq, fam.n_ineq, hidden, cfg.seed);
  AdamState adam = AdamState::zero_like(model.net);

  // Probe set and its reference objectives, solved once.
  std::vector<int> probe(out.test_idx.begin(),
                         out.test_idx.begin() +
                             std::min<size_t>(out.test_idx.size(), 20));
  if (probe.empty()) probe.assign(out.train_idx.begin(),
                                  out.train_idx.begin() +
                                      std::min<size_t>(out.train_idx.size(), 20));
  std::vector<double> probe_ref;
  for (int idx : probe)
    probe_ref.push_back(solve_nlp_reference(fam, xs[idx]).objective);

  const auto probe_metrics = [&](double& aog, double& max_viol) {
    std::vector<double> model_obj;
    max_viol = 0.0;
    for (int idx : probe) {
      const PrimalDualPoint z_hat = model.forward(xs[idx]);
      const ProjectionResult pr = project_k(fam, xs[idx], z_hat, cfg.projection);
      model_obj.push_back(fam.f(xs[idx], pr.point.y));
      max_viol = std::max(max_viol, max_violation(fam.evaluate(xs[idx], pr.point.y)));
    }
    aog = average_optimality_gap(model_obj, probe_ref);
  };

  const size_t batch =
      cfg.batch_size > 0 ? static_cast<size_t>(cfg.batch_size) : n_train;
  double last_aog = std::numeric_limits<double>::quiet_NaN();
  double last_viol = std::numeric_limits<double>::quiet_NaN();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    LossTerms epoch_loss;
    size_t seen = 0;
    for (size_t start = 0; start < n_train; start += batch) {
      const size_t stop = std::min(n_train, start + batch);
      MlpGrads grads = MlpGrads::zero_like(model.net);
      for (size_t i = start; i < stop; ++i) {
        const LossTerms t =
            backbone_instance_gradient(fam, xs[out.train_idx[i]], model, cfg, grads);
        epoch_loss.total += t.total;
        epoch_loss.f_term += t.f_term;
        epoch_loss.eq_term += t.eq_term;
        epoch_loss.ineq_term += t.ineq_term;
        epoch_loss.consistency += t.consistency;
        ++seen;
      }
      grads.scale(1.0 / static_cast<double>(stop - start));
      adam.step(model.net, grads, cfg.adam);
    }
    epoch_loss.total /= static_cast<double>(seen);
    epoch_loss.f_term /= static_cast<double>(seen);
    epoch_loss.eq_term /= static_cast<double>(seen);
    epoch_loss.ineq_term /= static_cast<double>(seen);
    epoch_loss.consistency /= static_cast<double>(seen);

    const bool eval_now = (epoch + 1) % std::max(1, cfg.eval_every) == 0 ||
                          epoch + 1 == cfg.epochs;
    if (eval_now) probe_metrics(last_aog, last_viol);
    out.history.push_back(HistoryRow{epoch, epoch_loss, last_aog, last_viol});
    out.model = model;
    if (cfg.target_aog > 0.0 && eval_now && std::isfinite(last_aog) &&
        std::abs(last_aog) <= cfg.target_aog)
      break;
  }
  out.model = model;
  return out;
}

/// Deployment path: predict, then project. The returned point is feasible
/// for the original constraints to the projection tolerance regardless of
/// training state.
inline ProjectionResult infer(const Backbone& model, const ParametricNlpFamily& fam,
                              const Vec& x, const ProjectionConfig& cfg = {}) {
  return project_k(fam, x, model.forward(x), cfg);
}

}  // namespace nlproj
