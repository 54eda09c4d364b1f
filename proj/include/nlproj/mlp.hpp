#pragma once

/// @file mlp.hpp Small fully connected ReLU network mapping problem
/// parameters to a stacked primal-dual prediction, with hand-rolled
/// backprop and Adam. Deliberately minimal: desk-scale problems, full
/// determinism under a fixed seed.

#include "nlproj/types.hpp"

#include <vector>

namespace nlproj {

/// Weights and biases, layer i mapping sizes[i] -> sizes[i+1]. Hidden
/// layers apply ReLU; the output layer is linear (heads are applied by the
/// backbone wrapper).
struct MlpParams {
  std::vector<Mat> W;
  std::vector<Vec> b;

  static MlpParams init(const std::vector<int>& sizes, std::uint64_t seed) {
    require(sizes.size() >= 2, "MlpParams: need at least input and output sizes");
    Rng rng(derive_seed(seed, 0x317ULL));
    MlpParams p;
    for (size_t i = 0; i + 1 < sizes.size(); ++i) {
      const int fan_in = sizes[i], fan_out = sizes[i + 1];
      const double bound = std::sqrt(6.0 / fan_in);
      Mat w(fan_out, fan_in);
      for (int r = 0; r < fan_out; ++r)
        for (int c2 = 0; c2 < fan_in; ++c2) w(r, c2) = rng.uniform(-bound, bound);
      p.W.push_back(std::move(w));
      p.b.push_back(Vec::Zero(fan_out));
    }
    return p;
  }

  size_t n_layers() const { return W.size(); }

  Eigen::Index n_scalars() const {
    Eigen::Index n = 0;
    for (size_t i = 0; i < W.size(); ++i) n += W[i].size() + b[i].size();
    return n;
  }

  /// Flat parameter view, used by the finite-difference checks.
  Vec flatten() const {
    Vec v(n_scalars());
    Eigen::Index at = 0;
    for (size_t i = 0; i < W.size(); ++i) {
      for (Eigen::Index c2 = 0; c2 < W[i].cols(); ++c2)
        for (Eigen::Index r = 0; r < W[i].rows(); ++r) v[at++] = W[i](r, c2);
      for (Eigen::Index r = 0; r < b[i].size(); ++r) v[at++] = b[i][r];
    }
    return v;
  }

  void unflatten(const Vec& v) {
    require(v.size() == n_scalars(), "MlpParams: flat size mismatch");
    Eigen::Index at = 0;
    for (size_t i = 0; i < W.size(); ++i) {
      for (Eigen::Index c2 = 0; c2 < W[i].cols(); ++c2)
        for (Eigen::Index r = 0; r < W[i].rows(); ++r) W[i](r, c2) = v[at++];
      for (Eigen::Index r = 0; r < b[i].size(); ++r) b[i][r] = v[at++];
    }
  }
};

/// Activations cached by a forward pass; inputs[i] feeds layer i,
/// preact[i] is W_i inputs[i] + b_i before the nonlinearity.
struct MlpTape {
  std::vector<Vec> inputs;
  std::vector<Vec> preact;
  Vec output;
};

inline MlpTape mlp_forward_tape(const MlpParams& p, const Vec& x) {
  MlpTape tape;
  Vec a = x;
  for (size_t i = 0; i < p.W.size(); ++i) {
    tape.inputs.push_back(a);
    Vec z = p.W[i] * a + p.b[i];
    tape.preact.push_back(z);
    a = i + 1 < p.W.size() ? Vec(z.cwiseMax(0.0)) : z;
  }
  tape.output = a;
  return tape;
}

struct MlpGrads {
  std::vector<Mat> dW;
  std::vector<Vec> db;

  static MlpGrads zero_like(const MlpParams& p) {
    MlpGrads g;
    for (size_t i = 0; i < p.W.size(); ++i) {
      g.dW.push_back(Mat::Zero(p.W[i].rows(), p.W[i].cols()));
      g.db.push_back(Vec::Zero(p.b[i].size()));
    }
    return g;
  }

  void scale(double s) {
    for (auto& m : dW) m *= s;
    for (auto& v : db) v *= s;
  }
};

/// Backprop from an output cotangent, accumulating into grads.
inline void mlp_backward(const MlpParams& p, const MlpTape& tape, const Vec& out_bar,
                         MlpGrads& grads) {
  Vec delta = out_bar;
  for (size_t i = p.W.size(); i-- > 0;) {
    if (i + 1 < p.W.size()) {
      // ReLU gate of the hidden layer output; derivative 0 at the kink.
      for (Eigen::Index r = 0; r < delta.size(); ++r)
        if (tape.preact[i][r] <= 0.0) delta[r] = 0.0;
    }
    grads.dW[i].noalias() += delta * tape.inputs[i].transpose();
    grads.db[i].noalias() += delta;
    if (i > 0) delta = p.W[i].transpose() * delta;
  }
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Mat> mW, vW;
  std::vector<Vec> mb, vb;
  long t = 0;

  static AdamState zero_like(const MlpParams& p) {
    AdamState s;
    for (size_t i = 0; i < p.W.size(); ++i) {
      s.mW.push_back(Mat::Zero(p.W[i].rows(), p.W[i].cols()));
      s.vW.push_back(Mat::Zero(p.W[i].rows(), p.W[i].cols()));
      s.mb.push_back(Vec::Zero(p.b[i].size()));
      s.vb.push_back(Vec::Zero(p.b[i].size()));
    }
    return s;
  }

  void step(MlpParams& p, const MlpGrads& g, const AdamConfig& cfg) {
    ++t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (size_t i = 0; i < p.W.size(); ++i) {
      mW[i] = cfg.beta1 * mW[i] + (1.0 - cfg.beta1) * g.dW[i];
      vW[i] = cfg.beta2 * vW[i] + (1.0 - cfg.beta2) * g.dW[i].cwiseProduct(g.dW[i]);
      p.W[i].array() -=
          cfg.lr * (mW[i] / bc1).array() / ((vW[i] / bc2).array().sqrt() + cfg.eps);
      mb[i] = cfg.beta1 * mb[i] + (1.0 - cfg.beta1) * g.db[i];
      vb[i] = cfg.beta2 * vb[i] + (1.0 - cfg.beta2) * g.db[i].cwiseProduct(g.db[i]);
      p.b[i].array() -=
          cfg.lr * (mb[i] / bc1).array() / ((vb[i] / bc2).array().sqrt() + cfg.eps);
    }
  }
};

/// Network plus problem dimensions; the output splits into (y, lam, mu)
/// heads with the mu head rectified so predicted inequality multipliers are
/// always admissible.
struct Backbone {
  MlpParams net;
  int n_vars = 0, n_eq = 0, n_ineq = 0;

  static Backbone init(int n_params, int n_vars, int n_eq, int n_ineq,
                       const std::vector<int>& hidden, std::uint64_t seed) {
    std::vector<int> sizes;
    sizes.push_back(n_params);
    for (int h : hidden) sizes.push_back(h);
    sizes.push_back(n_vars + n_eq + n_ineq);
    Backbone bb;
    bb.net = MlpParams::init(sizes, seed);
    bb.n_vars = n_vars;
    bb.n_eq = n_eq;
    bb.n_ineq = n_ineq;
    return bb;
  }

  PrimalDualPoint forward(const Vec& x) const {
    const Vec raw = mlp_forward_tape(net, x).output;
    return split(raw);
  }

  PrimalDualPoint split(const Vec& raw) const {
    PrimalDualPoint z = PrimalDualPoint::from_stacked(raw, n_vars, n_eq, n_ineq);
    z.mu = z.mu.cwiseMax(0.0);
    return z;
  }

  /// Cotangent on the rectified prediction pulled back to the raw output.
  Vec head_backward(const Vec& raw, const Vec& z_bar) const {
    Vec out = z_bar;
    for (int i = 0; i < n_ineq; ++i) {
      const Eigen::Index at = n_vars + n_eq + i;
      if (raw[at] <= 0.0) out[at] = 0.0;
    }
    return out;
  }
};

}  // namespace nlproj
