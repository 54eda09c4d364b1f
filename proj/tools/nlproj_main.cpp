/// Command-line front end: generate families, solve single instances,
/// run the layered projection, train and evaluate the predictor, check
/// gradients against finite differences, and run the full benchmark.
/// All outputs are deterministic under a fixed seed except the timing
/// report, which is written separately.

#include "nlproj/nlproj.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

using namespace nlproj;

FamilyKind parse_kind(const std::string& s) {
  if (s == "qp") return FamilyKind::kQp;
  if (s == "qcqp") return FamilyKind::kQcqp;
  if (s == "nlp") return FamilyKind::kConvexNlp;
  if (s == "nonconvex") return FamilyKind::kNonconvex;
  throw CLI::ValidationError("kind", "expected qp, qcqp, nlp, or nonconvex");
}

std::vector<int> parse_hidden(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

/// Feasible witness when the family has one, otherwise zero clamped into the
/// variable box.
Vec initial_guess(const ParametricNlpFamily& fam, const Vec& x) {
  if (auto w = fam.feasible_point(x)) return *w;
  const Vec l = fam.lower(x), u = fam.upper(x);
  Vec y = Vec::Zero(fam.n_vars);
  for (int i = 0; i < fam.n_vars; ++i) y[i] = std::min(std::max(y[i], l[i]), u[i]);
  return y;
}

Vec load_param(const std::string& family_path, const std::string& params_path, int index,
               ParametricNlpFamily& fam) {
  fam = family_from_json(read_json(family_path));
  const auto xs = params_from_json(read_json(params_path));
  require(index >= 0 && index < static_cast<int>(xs.size()),
          "parameter index out of range");
  return xs[static_cast<std::size_t>(index)];
}

int cmd_gen(const std::string& kind, const GenDims& dims, std::uint64_t seed, int count,
            const std::string& out, const std::string& params_out) {
  const auto fam = generate_family(parse_kind(kind), dims, seed);
  write_json(out, family_to_json(fam));
  std::printf("wrote %s (%s, n=%d, m_eq=%d, m_ineq=%d, p=%d)\n", out.c_str(),
              kind.c_str(), fam.n_vars, fam.n_eq, fam.n_ineq, fam.n_params);
  if (!params_out.empty()) {
    const auto xs = sample_parameters(fam, count, derive_seed(seed, 1));
    write_json(params_out, params_to_json(xs));
    std::printf("wrote %s (%d draws)\n", params_out.c_str(), count);
  }
  return 0;
}

int cmd_solve(const std::string& family_path, const std::string& params_path, int index,
              const std::string& method, double tol, int max_layers,
              const std::string& out) {
  ParametricNlpFamily fam;
  const Vec x = load_param(family_path, params_path, index, fam);
  Json rep;
  rep["method"] = method;

  if (method == "oracle") {
    const auto ref = solve_nlp_reference(fam, x);
    rep["point"] = point_to_json(ref.point);
    rep["objective"] = encode_scalar(ref.objective);
    rep["converged"] = ref.converged;
    rep["outer_iters"] = ref.outer_iters;
    rep["stationary_only"] = ref.stationary_only;
  } else if (method == "soc") {
    const auto prog = soc_program_from_family(fam, x);
    const auto sr = solve_qcqp_soc(prog);
    rep["objective"] = encode_scalar(sr.objective);
    rep["converged"] = sr.converged;
    rep["iters"] = sr.iters;
    rep["prim_inf"] = encode_scalar(sr.prim_inf);
    rep["gap"] = encode_scalar(sr.gap);
    Json pt;
    pt["y"] = encode_vec(sr.y);
    pt["lam"] = encode_vec(sr.lam);
    Json mus = Json::array();
    for (const auto& m : sr.mu) mus.push_back(encode_vec(m));
    pt["mu_balls"] = std::move(mus);
    rep["point"] = std::move(pt);
  } else {
    // Fixed-point iteration of single projection layers until the primal
    // step stalls below tol.
    ProjectionConfig cfg;
    cfg.use_acceleration = method == "cp-accel";
    PrimalDualPoint z = PrimalDualPoint::Zero(fam.n_vars, fam.n_eq, fam.n_ineq);
    z.y = initial_guess(fam, x);
    int layers = 0;
    double step = kInf;
    while (layers < max_layers) {
      const PrimalDualPoint next = project_once(fam, x, z, cfg);
      step = (next.y - z.y).lpNorm<Eigen::Infinity>();
      z = next;
      ++layers;
      if (step <= tol) break;
    }
    rep["point"] = point_to_json(z);
    rep["objective"] = encode_scalar(fam.f(x, z.y));
    rep["converged"] = step <= tol;
    rep["layers"] = layers;
    rep["last_step"] = encode_scalar(step);
    rep["violation"] = encode_scalar(max_violation(fam.evaluate(x, z.y)));
  }

  if (out.empty())
    std::printf("%s\n", rep.dump(2).c_str());
  else
    write_json(out, rep);
  return rep.value("converged", false) ? 0 : 1;
}

int cmd_project(const std::string& family_path, const std::string& params_path, int index,
                double rho, int k, bool early_stop, double guess_scale,
                std::uint64_t seed, const std::string& out) {
  ParametricNlpFamily fam;
  const Vec x = load_param(family_path, params_path, index, fam);
  Rng rng(derive_seed(seed, 0x9fULL));
  PrimalDualPoint z = PrimalDualPoint::Zero(fam.n_vars, fam.n_eq, fam.n_ineq);
  z.y = initial_guess(fam, x) + guess_scale * rng.normal_vec(fam.n_vars);

  ProjectionConfig cfg;
  cfg.rho = rho;
  cfg.k = k;
  cfg.early_stop = early_stop;
  const auto res = project_k(fam, x, z, cfg);
  Json rep = projection_result_to_json(res);
  rep["violation"] = encode_scalar(max_violation(fam.evaluate(x, res.point.y)));
  rep["objective"] = encode_scalar(fam.f(x, res.point.y));
  if (out.empty())
    std::printf("%s\n", rep.dump(2).c_str());
  else
    write_json(out, rep);
  return 0;
}

TrainConfig build_train_config(int epochs, const std::string& hidden, std::uint64_t seed,
                               double lr, double split, int eval_every, double alpha,
                               double rho, int k, int batch, double target_aog,
                               bool last_layer_only) {
  TrainConfig cfg;
  cfg.hidden = parse_hidden(hidden);
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.split = split;
  cfg.eval_every = eval_every;
  cfg.seed = seed;
  cfg.adam.lr = lr;
  cfg.loss.alpha = alpha;
  cfg.projection.rho = rho;
  cfg.projection.k = k;
  cfg.target_aog = target_aog;
  cfg.last_layer_only = last_layer_only;
  return cfg;
}

int cmd_train(const std::string& family_path, const std::string& params_path,
              const TrainConfig& cfg, const std::string& model_out,
              const std::string& history_out) {
  const auto fam = family_from_json(read_json(family_path));
  const auto xs = params_from_json(read_json(params_path));
  const auto res = train_backbone(fam, xs, cfg);
  write_json(model_out, model_to_json(res.model));
  if (!history_out.empty()) write_history_csv(history_out, res.history);
  const auto& last = res.history.back();
  std::printf("trained %d epochs: loss=%.6g aog=%.4g%% max_violation=%.3g\n",
              last.epoch + 1, last.loss.total, last.aog, last.max_violation);
  return 0;
}

int cmd_eval(const std::string& family_path, const std::string& params_path,
             const std::string& model_path, double rho, int k, const std::string& out,
             double max_aog, double max_viol) {
  const auto fam = family_from_json(read_json(family_path));
  const auto xs = params_from_json(read_json(params_path));
  const auto model = model_from_json(read_json(model_path));
  ProjectionConfig proj;
  proj.rho = rho;
  proj.k = k;

  std::vector<int> idx(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) idx[i] = static_cast<int>(i);
  BenchResult acc;
  evaluate_model(fam, model, xs, idx, proj, acc);

  Json m;
  m["n_instances"] = xs.size();
  m["aog_percent"] = encode_scalar(acc.aog);
  m["max_eq_violation"] = encode_scalar(acc.violations.max_eq);
  m["mean_eq_violation"] = encode_scalar(acc.violations.mean_eq);
  m["max_ineq_violation"] = encode_scalar(acc.violations.max_ineq);
  m["mean_ineq_violation"] = encode_scalar(acc.violations.mean_ineq);
  m["active_set_agreement"] = encode_scalar(acc.agreement);
  if (out.empty())
    std::printf("%s\n", m.dump(2).c_str());
  else
    write_json(out, m);

  const double worst = std::max(acc.violations.max_eq, acc.violations.max_ineq);
  const bool ok = acc.aog <= max_aog && worst <= max_viol;
  std::printf("aog=%.4g%% worst_violation=%.3g agreement=%.4f -> %s\n", acc.aog, worst,
              acc.agreement, ok ? "ok" : "over threshold");
  return ok ? 0 : 1;
}

int cmd_grad_check(const std::string& family_path, const std::string& params_path,
                   int index, std::uint64_t seed, double rho, int k, int n_coords,
                   double fd_step, double tol) {
  ParametricNlpFamily fam;
  const Vec x = load_param(family_path, params_path, index, fam);

  TrainConfig cfg;
  cfg.projection.rho = rho;
  cfg.projection.k = k;
  Backbone model = Backbone::init(fam.n_params, fam.n_vars, fam.n_eq, fam.n_ineq, {8},
                                  derive_seed(seed, 2));

  const auto loss_at = [&](const Backbone& m) {
    const MlpTape tape = mlp_forward_tape(m.net, x);
    const PrimalDualPoint z_hat = m.split(tape.output);
    const auto res = project_k(fam, x, z_hat, cfg.projection);
    return training_loss(fam, x, z_hat, res.point, cfg.loss).total;
  };

  MlpGrads grads = MlpGrads::zero_like(model.net);
  backbone_instance_gradient(fam, x, model, cfg, grads);

  // Pack the gradient in the same column-major-per-layer order as flatten().
  const Vec flat = model.net.flatten();
  Vec analytic(flat.size());
  {
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < grads.dW.size(); ++l) {
      for (Eigen::Index c = 0; c < grads.dW[l].cols(); ++c)
        for (Eigen::Index r = 0; r < grads.dW[l].rows(); ++r)
          analytic[pos++] = grads.dW[l](r, c);
      for (Eigen::Index r = 0; r < grads.db[l].size(); ++r) analytic[pos++] = grads.db[l][r];
    }
  }

  Rng pick(derive_seed(seed, 3));
  const int checks = std::min<int>(n_coords, static_cast<int>(flat.size()));
  double worst = 0.0;
  for (int t = 0; t < checks; ++t) {
    const auto i = static_cast<Eigen::Index>(pick.uniform_index(flat.size()));
    Backbone pert = model;
    Vec f2 = flat;
    f2[i] = flat[i] + fd_step;
    pert.net.unflatten(f2);
    const double hi = loss_at(pert);
    f2[i] = flat[i] - fd_step;
    pert.net.unflatten(f2);
    const double lo = loss_at(pert);
    const double fd = (hi - lo) / (2 * fd_step);
    const double rel = std::abs(fd - analytic[i]) /
                       std::max({std::abs(fd), std::abs(analytic[i]), 1.0});
    worst = std::max(worst, rel);
  }
  std::printf("checked %d coordinates: max relative error %.3e (tol %.1e)\n", checks,
              worst, tol);
  return worst <= tol ? 0 : 1;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out_dir) {
  const auto res = run_benchmark(cfg);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_json(out_dir + "/metrics.json", res.metrics);
    write_json(out_dir + "/timing.json", res.timing);
    write_json(out_dir + "/model.json", model_to_json(res.train.model));
    write_history_csv(out_dir + "/history.csv", res.train.history);
  }
  std::printf("%s\n", res.metrics.dump(2).c_str());
  std::printf("benchmark %s\n", res.passed ? "passed" : "failed thresholds");
  return res.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned parameter-to-solution maps with layered feasibility projection"};
  app.require_subcommand(1);

  // Shared knobs, bound per subcommand below.
  std::string kind = "qp", family_path, params_path, model_path, out, params_out;
  std::string history_out, out_dir, method = "cp", hidden;
  GenDims dims;
  std::uint64_t seed = 0;
  int count = 100, index = 0, max_layers = 200, k = 1, epochs = 500, eval_every = 25;
  int batch = 0, n_coords = 24, instances = 200;
  double tol = 1e-9, rho = 1.0, guess_scale = 1.0, lr = 1e-3, split = 0.8, alpha = 10.0;
  double target_aog = 0.0, fd_step = 1e-5, grad_tol = 1e-3;
  double max_aog = 1.0, max_viol = 1e-8, min_agreement = 0.0;
  bool early_stop = false, last_layer_only = false;

  auto add_dims = [&](CLI::App* c) {
    c->add_option("--n-vars", dims.n_vars, "number of decision variables");
    c->add_option("--n-eq", dims.n_eq, "number of equality constraints");
    c->add_option("--n-ineq", dims.n_ineq, "number of inequality constraints");
    c->add_option("--n-params", dims.n_params, "parameter dimension");
  };

  auto* gen = app.add_subcommand("gen", "generate a family and parameter draws");
  gen->add_option("--kind", kind, "qp, qcqp, nlp, or nonconvex");
  add_dims(gen);
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--count", count, "number of parameter draws");
  gen->add_option("--out", out, "family output path")->required();
  gen->add_option("--params-out", params_out, "parameter set output path");

  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("--family", family_path)->required();
  solve->add_option("--params", params_path)->required();
  solve->add_option("--index", index, "parameter index");
  solve->add_option("--method", method)
      ->check(CLI::IsMember({"cp", "cp-accel", "soc", "oracle"}));
  solve->add_option("--tol", tol, "fixed-point step tolerance");
  solve->add_option("--max-layers", max_layers);
  solve->add_option("--out", out, "report path (stdout when omitted)");

  auto* project = app.add_subcommand("project", "run the layered projection");
  project->add_option("--family", family_path)->required();
  project->add_option("--params", params_path)->required();
  project->add_option("--index", index);
  project->add_option("--rho", rho, "curvature weight");
  project->add_option("--k", k, "number of layers");
  project->add_flag("--early-stop", early_stop, "stop once feasible");
  project->add_option("--guess-scale", guess_scale, "noise scale on the start point");
  project->add_option("--seed", seed);
  project->add_option("--out", out);

  auto* train = app.add_subcommand("train", "train the predictor");
  train->add_option("--family", family_path)->required();
  train->add_option("--params", params_path)->required();
  train->add_option("--epochs", epochs);
  train->add_option("--hidden", hidden, "comma-separated hidden sizes");
  train->add_option("--seed", seed);
  train->add_option("--lr", lr);
  train->add_option("--split", split, "train fraction");
  train->add_option("--eval-every", eval_every);
  train->add_option("--alpha", alpha, "consistency weight");
  train->add_option("--rho", rho);
  train->add_option("--k", k);
  train->add_option("--batch", batch, "minibatch size (0 = full)");
  train->add_option("--target-aog", target_aog, "early-stop AOG percent (0 = off)");
  train->add_flag("--last-layer-only", last_layer_only, "backprop only the last layer");
  train->add_option("--model-out", model_path)->required();
  train->add_option("--history-out", history_out);

  auto* eval = app.add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--family", family_path)->required();
  eval->add_option("--params", params_path)->required();
  eval->add_option("--model", model_path)->required();
  eval->add_option("--rho", rho);
  eval->add_option("--k", k);
  eval->add_option("--out", out);
  eval->add_option("--max-aog", max_aog, "AOG threshold, percent");
  eval->add_option("--max-viol", max_viol, "violation threshold");

  auto* grad = app.add_subcommand("grad-check", "finite-difference gradient check");
  grad->add_option("--family", family_path)->required();
  grad->add_option("--params", params_path)->required();
  grad->add_option("--index", index);
  grad->add_option("--seed", seed);
  grad->add_option("--rho", rho);
  grad->add_option("--k", k);
  grad->add_option("--n-coords", n_coords, "coordinates to probe");
  grad->add_option("--fd-step", fd_step);
  grad->add_option("--tol", grad_tol);

  auto* bench = app.add_subcommand("bench", "full generate-train-evaluate run");
  bench->add_option("--kind", kind);
  add_dims(bench);
  bench->add_option("--instances", instances);
  bench->add_option("--epochs", epochs);
  bench->add_option("--hidden", hidden);
  bench->add_option("--seed", seed);
  bench->add_option("--lr", lr);
  bench->add_option("--alpha", alpha);
  bench->add_option("--rho", rho);
  bench->add_option("--k", k);
  bench->add_option("--target-aog", target_aog);
  bench->add_option("--max-aog", max_aog);
  bench->add_option("--max-viol", max_viol);
  bench->add_option("--min-agreement", min_agreement);
  bench->add_option("--out-dir", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(kind, dims, seed, count, out, params_out);
    if (solve->parsed())
      return cmd_solve(family_path, params_path, index, method, tol, max_layers, out);
    if (project->parsed())
      return cmd_project(family_path, params_path, index, rho, k, early_stop,
                         guess_scale, seed, out);
    if (train->parsed())
      return cmd_train(family_path, params_path,
                       build_train_config(epochs, hidden, seed, lr, split, eval_every,
                                          alpha, rho, k, batch, target_aog,
                                          last_layer_only),
                       model_path, history_out);
    if (eval->parsed())
      return cmd_eval(family_path, params_path, model_path, rho, k, out, max_aog,
                      max_viol);
    if (grad->parsed())
      return cmd_grad_check(family_path, params_path, index, seed, rho, k, n_coords,
                            fd_step, grad_tol);
    if (bench->parsed()) {
      BenchConfig cfg;
      cfg.kind = parse_kind(kind);
      cfg.dims = dims;
      cfg.n_instances = instances;
      cfg.seed = seed;
      cfg.train = build_train_config(epochs, hidden, seed, lr, split, eval_every, alpha,
                                     rho, k, batch, target_aog, last_layer_only);
      cfg.max_aog_percent = max_aog;
      cfg.max_violation = max_viol;
      cfg.min_agreement = min_agreement;
      return cmd_bench(cfg, out_dir);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
