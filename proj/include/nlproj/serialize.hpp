#pragma once

/// @file serialize.hpp JSON round-trips for families, parameter sets, and
/// model checkpoints, plus report dumps and the training-history CSV.
/// Non-finite scalars are encoded as the strings "inf", "-inf", "nan" since
/// JSON has no literals for them. All objects use insertion-ordered keys so
/// identical inputs dump to identical bytes.

#include "nlproj/family.hpp"
#include "nlproj/mlp.hpp"
#include "nlproj/projection.hpp"
#include "nlproj/trainer.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace nlproj {

using Json = nlohmann::ordered_json;

inline Json encode_scalar(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double decode_scalar(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DimensionError("decode_scalar: unrecognized scalar string");
  }
  return j.get<double>();
}

inline Json encode_vec(const Vec& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(encode_scalar(v[i]));
  return arr;
}

inline Vec decode_vec(const Json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = decode_scalar(e);
  return v;
}

/// Matrices carry explicit dims so zero-row and zero-column shapes survive.
inline Json encode_mat(const Mat& m) {
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(encode_scalar(m(i, j)));
  out["data"] = std::move(data);
  return out;
}

inline Mat decode_mat(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  require(static_cast<Eigen::Index>(data.size()) == rows * cols,
          "decode_mat: data length does not match dims");
  Mat m(rows, cols);
  Eigen::Index k = 0;
  for (const auto& e : data) {
    m(k / cols, k % cols) = decode_scalar(e);
    ++k;
  }
  return m;
}

namespace detail {

inline void put_backbone_common(Json& d, const Mat& Q, const Vec& c0, const Mat& A,
                                const Vec& b0, const Mat& B, const Vec& l0,
                                const Vec& u0, const Mat& Lb, const Mat& Ub,
                                const Vec& x_low, const Vec& x_high, const Vec& y_center,
                                const Mat& T, double lip) {
  d["Q"] = encode_mat(Q);
  d["c0"] = encode_vec(c0);
  d["A"] = encode_mat(A);
  d["b0"] = encode_vec(b0);
  d["B"] = encode_mat(B);
  d["l0"] = encode_vec(l0);
  d["u0"] = encode_vec(u0);
  d["Lb"] = encode_mat(Lb);
  d["Ub"] = encode_mat(Ub);
  d["x_low"] = encode_vec(x_low);
  d["x_high"] = encode_vec(x_high);
  d["y_center"] = encode_vec(y_center);
  d["T"] = encode_mat(T);
  d["lip_grad"] = encode_scalar(lip);
}

template <typename D>
inline void get_backbone_common(const Json& j, D& d) {
  d.Q = decode_mat(j.at("Q"));
  d.c0 = decode_vec(j.at("c0"));
  d.A = decode_mat(j.at("A"));
  d.b0 = decode_vec(j.at("b0"));
  d.B = decode_mat(j.at("B"));
  d.l0 = decode_vec(j.at("l0"));
  d.u0 = decode_vec(j.at("u0"));
  d.Lb = decode_mat(j.at("Lb"));
  d.Ub = decode_mat(j.at("Ub"));
  d.x_low = decode_vec(j.at("x_low"));
  d.x_high = decode_vec(j.at("x_high"));
  d.y_center = decode_vec(j.at("y_center"));
  d.T = decode_mat(j.at("T"));
  d.lip_grad = decode_scalar(j.at("lip_grad"));
}

}  // namespace detail

inline Json family_to_json(const ParametricNlpFamily& fam) {
  Json out;
  out["kind"] = to_string(fam.kind);
  out["n_vars"] = fam.n_vars;
  out["n_eq"] = fam.n_eq;
  out["n_ineq"] = fam.n_ineq;
  out["n_params"] = fam.n_params;
  Json d;
  switch (fam.kind) {
    case FamilyKind::kQp: {
      const auto& fd = std::get<QpFamilyData>(fam.data);
      detail::put_backbone_common(d, fd.Q, fd.c0, fd.A, fd.b0, fd.B, fd.l0, fd.u0,
                                  fd.Lb, fd.Ub, fd.x_low, fd.x_high, fd.y_center,
                                  fd.T, fd.lip_grad);
      d["C"] = encode_mat(fd.C);
      d["d0"] = encode_vec(fd.d0);
      break;
    }
    case FamilyKind::kQcqp: {
      const auto& fd = std::get<QcqpFamilyData>(fam.data);
      detail::put_backbone_common(d, fd.Q, fd.c0, fd.A, fd.b0, fd.B, fd.l0, fd.u0,
                                  fd.Lb, fd.Ub, fd.x_low, fd.x_high, fd.y_center,
                                  fd.T, fd.lip_grad);
      d["R"] = encode_mat(fd.R);
      d["alpha"] = encode_vec(fd.alpha);
      d["beta"] = encode_vec(fd.beta);
      d["E"] = encode_mat(fd.E);
      break;
    }
    case FamilyKind::kConvexNlp: {
      const auto& fd = std::get<ConvexNlpFamilyData>(fam.data);
      detail::put_backbone_common(d, fd.Q, fd.c0, fd.A, fd.b0, fd.B, fd.l0, fd.u0,
                                  fd.Lb, fd.Ub, fd.x_low, fd.x_high, fd.y_center,
                                  fd.T, fd.lip_grad);
      d["Aexp"] = encode_mat(fd.Aexp);
      d["Wdiag"] = encode_mat(fd.Wdiag);
      d["beta"] = encode_vec(fd.beta);
      d["E"] = encode_mat(fd.E);
      break;
    }
    case FamilyKind::kNonconvex: {
      const auto& fd = std::get<NonconvexFamilyData>(fam.data);
      d["Q_diag"] = encode_vec(fd.q);
      d["p"] = encode_vec(fd.p);
      d["A"] = encode_mat(fd.A);
      d["G"] = encode_mat(fd.G);
      d["h_rhs"] = encode_vec(fd.h_rhs);
      d["l0"] = encode_vec(fd.l0);
      d["u0"] = encode_vec(fd.u0);
      d["x_low"] = encode_vec(fd.x_low);
      d["x_high"] = encode_vec(fd.x_high);
      d["A_pinv"] = encode_mat(fd.A_pinv);
      d["lip_grad"] = encode_scalar(fd.lip_grad);
      break;
    }
    default:
      throw DimensionError("family_to_json: custom families are not serializable");
  }
  out["data"] = std::move(d);
  return out;
}

inline ParametricNlpFamily family_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const Json& d = j.at("data");
  ParametricNlpFamily fam = [&] {
    if (kind == "qp") {
      QpFamilyData fd;
      detail::get_backbone_common(d, fd);
      fd.C = decode_mat(d.at("C"));
      fd.d0 = decode_vec(d.at("d0"));
      return make_family(std::move(fd));
    }
    if (kind == "qcqp") {
      QcqpFamilyData fd;
      detail::get_backbone_common(d, fd);
      fd.R = decode_mat(d.at("R"));
      fd.alpha = decode_vec(d.at("alpha"));
      fd.beta = decode_vec(d.at("beta"));
      fd.E = decode_mat(d.at("E"));
      return make_family(std::move(fd));
    }
    if (kind == "nlp") {
      ConvexNlpFamilyData fd;
      detail::get_backbone_common(d, fd);
      fd.Aexp = decode_mat(d.at("Aexp"));
      fd.Wdiag = decode_mat(d.at("Wdiag"));
      fd.beta = decode_vec(d.at("beta"));
      fd.E = decode_mat(d.at("E"));
      return make_family(std::move(fd));
    }
    if (kind == "nonconvex") {
      NonconvexFamilyData fd;
      fd.q = decode_vec(d.at("Q_diag"));
      fd.p = decode_vec(d.at("p"));
      fd.A = decode_mat(d.at("A"));
      fd.G = decode_mat(d.at("G"));
      fd.h_rhs = decode_vec(d.at("h_rhs"));
      fd.l0 = decode_vec(d.at("l0"));
      fd.u0 = decode_vec(d.at("u0"));
      fd.x_low = decode_vec(d.at("x_low"));
      fd.x_high = decode_vec(d.at("x_high"));
      fd.A_pinv = decode_mat(d.at("A_pinv"));
      fd.lip_grad = decode_scalar(d.at("lip_grad"));
      return make_family(std::move(fd));
    }
    throw DimensionError("family_from_json: unknown kind");
  }();
  require(fam.n_vars == j.at("n_vars").get<int>() &&
              fam.n_eq == j.at("n_eq").get<int>() &&
              fam.n_ineq == j.at("n_ineq").get<int>() &&
              fam.n_params == j.at("n_params").get<int>(),
          "family_from_json: header dims disagree with data");
  return fam;
}

inline Json params_to_json(const std::vector<Vec>& xs) {
  Json out;
  out["count"] = xs.size();
  Json arr = Json::array();
  for (const auto& x : xs) arr.push_back(encode_vec(x));
  out["params"] = std::move(arr);
  return out;
}

inline std::vector<Vec> params_from_json(const Json& j) {
  std::vector<Vec> xs;
  for (const auto& e : j.at("params")) xs.push_back(decode_vec(e));
  require(xs.size() == j.at("count").get<std::size_t>(),
          "params_from_json: count disagrees with array length");
  return xs;
}

inline Json model_to_json(const Backbone& model) {
  Json out;
  out["n_vars"] = model.n_vars;
  out["n_eq"] = model.n_eq;
  out["n_ineq"] = model.n_ineq;
  Json sizes = Json::array();
  sizes.push_back(model.net.W.front().cols());
  for (const auto& w : model.net.W) sizes.push_back(w.rows());
  out["layer_sizes"] = std::move(sizes);
  Json ws = Json::array(), bs = Json::array();
  for (const auto& w : model.net.W) ws.push_back(encode_mat(w));
  for (const auto& b : model.net.b) bs.push_back(encode_vec(b));
  out["weights"] = std::move(ws);
  out["biases"] = std::move(bs);
  return out;
}

inline Backbone model_from_json(const Json& j) {
  Backbone model;
  model.n_vars = j.at("n_vars").get<int>();
  model.n_eq = j.at("n_eq").get<int>();
  model.n_ineq = j.at("n_ineq").get<int>();
  for (const auto& e : j.at("weights")) model.net.W.push_back(decode_mat(e));
  for (const auto& e : j.at("biases")) model.net.b.push_back(decode_vec(e));
  require(model.net.W.size() == model.net.b.size(),
          "model_from_json: weight/bias count mismatch");
  require(!model.net.W.empty() &&
              model.net.W.back().rows() ==
                  model.n_vars + model.n_eq + model.n_ineq,
          "model_from_json: output layer does not match head dims");
  return model;
}

inline Json point_to_json(const PrimalDualPoint& pt) {
  Json out;
  out["y"] = encode_vec(pt.y);
  out["lam"] = encode_vec(pt.lam);
  out["mu"] = encode_vec(pt.mu);
  out["alpha"] = encode_vec(pt.alpha);
  out["beta"] = encode_vec(pt.beta);
  return out;
}

inline Json solve_report_to_json(const SolveReport& rep) {
  Json out;
  out["point"] = point_to_json(rep.point);
  out["converged"] = rep.converged;
  out["iters"] = rep.iters;
  out["objective"] = encode_scalar(rep.objective);
  out["prim_inf"] = encode_scalar(rep.final_residuals.prim_inf);
  out["gap"] = encode_scalar(rep.final_residuals.gap);
  out["dual_inf"] = encode_scalar(rep.final_residuals.dual_inf);
  out["norm_K"] = encode_scalar(rep.norm_K);
  out["tau"] = encode_scalar(rep.tau);
  out["sigma"] = encode_scalar(rep.sigma);
  out["gamma"] = encode_scalar(rep.gamma);
  out["step_condition_ok"] = rep.step_condition_ok;
  out["used_scaling"] = rep.used_scaling;
  return out;
}

inline Json projection_result_to_json(const ProjectionResult& res) {
  Json out;
  out["point"] = point_to_json(res.point);
  Json layers = Json::array();
  for (const auto& l : res.trace.layers) {
    Json e;
    e["violation"] = encode_scalar(l.violation);
    e["objective"] = encode_scalar(l.objective);
    e["inner_iters"] = l.inner_iters;
    e["inner_converged"] = l.inner_converged;
    layers.push_back(std::move(e));
  }
  out["layers"] = std::move(layers);
  out["stalled"] = res.trace.stalled;
  return out;
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  require(out.good(), "write_json: cannot open output file");
  out << j.dump(2) << "\n";
  require(out.good(), "write_json: write failed");
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_json: cannot open input file");
  return Json::parse(in);
}

/// Training history as CSV with full round-trip precision.
inline void write_history_csv(const std::string& path,
                              const std::vector<HistoryRow>& rows) {
  std::ofstream out(path);
  require(out.good(), "write_history_csv: cannot open output file");
  out << "epoch,loss,aog,max_violation\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.epoch, r.loss.total,
                  r.aog, r.max_violation);
    out << buf;
  }
  require(out.good(), "write_history_csv: write failed");
}

}  // namespace nlproj
