// vbal: command-line front end. Every run command prints (or writes with
// --out) a JSON report; errors go to stderr as JSON with exit code 1 for bad
// input and 2 for exhausted restart budgets.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vbal/bench.hpp"
#include "vbal/coloring.hpp"
#include "vbal/io.hpp"
#include "vbal/komlos.hpp"
#include "vbal/recenter.hpp"
#include "vbal/rng.hpp"
#include "vbal/subgauss.hpp"
#include "vbal/walk.hpp"

using namespace vbal;

namespace {

struct Options {
  std::uint64_t seed = 0;
  std::string out;
  std::string instance;
  std::string body;
  std::string mode = "practical";
  std::int64_t samples = 20000;
  double delta = 0.05;
  double epsilon = 0.05;
  int trials = 1;
  std::string emit_samples;
  double paouris_beta = kDefaultPaourisBeta;
  int max_restarts = 64;

  // generators
  Index n = 8, m = 8, t = 3, dim = 2;
  double norm_bound = 1.0;
  double target = 0.5;

  // solve-komlos, verify-subgaussian, bench
  double alpha = 1.0;
  std::string input = "-";
  int directions = 256;
  double sigma = 1.0;
  std::vector<Index> sizes{4, 8, 16};
  std::vector<std::string> families{"komlos", "beck-fiala", "zero"};
  std::vector<std::string> algorithms{"walk", "random"};
};

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const Options& o, const Json& j) {
  if (o.out.empty() || o.out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(o.out, j);
  }
}

Json measure_json(const MeasureEstimate& m) {
  return {{"p_hat", m.p_hat}, {"samples", m.samples}, {"ci_halfwidth", m.ci_halfwidth}, {"seed", m.seed}};
}

Json dims_json(const std::vector<Index>& dims) {
  Json out = Json::array();
  for (Index d : dims) out.push_back(d);
  return out;
}

Json run_generator(const std::string& kind, const Options& o) {
  if (kind == "gen-beck-fiala") return system_to_json(gen_beck_fiala(o.n, o.m, o.t, o.seed));
  if (kind == "gen-komlos") return system_to_json(gen_komlos(o.n, o.m, o.norm_bound, o.seed));
  return body_to_json(gen_cube_body(o.dim, o.target));
}

Json run_walk(const Options& o) {
  if (o.trials < 1) throw PreconditionError("walk: --trials must be at least 1");
  const VectorSystem sys = system_from_json(read_json_file(o.instance));
  const WalkMode mode = parse_walk_mode(o.mode);
  WalkParams p = walk_params(sys.count(), mode);
  p.max_restarts = o.max_restarts;
  const Timer timer;
  Eigen::MatrixXd residuals(o.trials, sys.dim());
  Json first;
  std::int64_t restarts = 0, steps = 0;
  double worst = 0.0;
  for (int k = 0; k < o.trials; ++k) {
    p.seed = o.trials == 1 ? o.seed : derive_seed(o.seed, static_cast<std::uint64_t>(k));
    const WalkTrace tr = sample_coloring(sys, p);
    residuals.row(k) = tr.residual.transpose();
    restarts += tr.restarts;
    steps += tr.steps_taken;
    if (tr.residual.size()) worst = std::max(worst, tr.residual.cwiseAbs().maxCoeff());
    if (k == 0) first = coloring_outputs(sys, tr.chi);
  }
  if (!o.emit_samples.empty()) {
    if (o.emit_samples == "-") {
      write_samples_csv(std::cout, residuals);
    } else {
      std::ofstream f(o.emit_samples);
      if (!f) throw PreconditionError("cannot write '" + o.emit_samples + "'");
      write_samples_csv(f, residuals);
    }
  }
  Json rep = make_report("walk",
                         {{"instance", o.instance},
                          {"mode", std::string(to_string(mode))},
                          {"trials", o.trials},
                          {"gamma", p.gamma},
                          {"delta", p.delta},
                          {"steps", p.steps},
                          {"max_restarts", p.max_restarts}},
                         o.seed);
  rep["instance_hash"] = instance_hash(sys);
  rep["outputs"] = first;
  rep["outputs"]["max_residual_linf"] = worst;
  rep["stats"] = {{"restarts", restarts}, {"steps_taken", steps}, {"wall_ms", timer.ms()}};
  return rep;
}

Json run_recenter(const Options& o) {
  const VectorSystem sys = system_from_json(read_json_file(o.instance));
  const ConvexBody body = body_from_json(read_json_file(o.body));
  RecenterOptions ro;
  ro.delta = o.delta;
  ro.epsilon = o.epsilon;
  ro.paouris_beta = o.paouris_beta;
  ro.measure_samples = o.samples;
  const Timer timer;
  const RecenterResult r = recenter(body, sys, FaceState::at_coloring(sys, reduce_to_independent(sys)), ro, o.seed);
  Json rep = make_report("recenter",
                         {{"instance", o.instance},
                          {"body", o.body},
                          {"delta", o.delta},
                          {"epsilon", o.epsilon},
                          {"paouris_beta", o.paouris_beta},
                          {"samples", o.samples}},
                         o.seed);
  rep["instance_hash"] = instance_hash(sys);
  rep["outputs"] = {{"status", r.ok() ? "ok" : "fail"},
                    {"fail_reason", r.fail_reason},
                    {"q", vector_to_json(r.q)},
                    {"face_coordinates", vector_to_json(r.face.coordinates())},
                    {"face_dim", r.face.dim()},
                    {"barycenter_norm", r.barycenter_norm},
                    {"measure_before", measure_json(r.measure_before)},
                    {"measure_after", measure_json(r.measure_after)}};
  rep["stats"] = {{"iterations", r.iterations},
                  {"descents", r.descents},
                  {"barycenter_samples", r.barycenter_samples},
                  {"wall_ms", timer.ms()}};
  return rep;
}

Json run_color_asym(const Options& o) {
  const VectorSystem sys = system_from_json(read_json_file(o.instance));
  const ConvexBody body = body_from_json(read_json_file(o.body));
  AsymPipelineConfig cfg;
  cfg.seed = o.seed;
  cfg.paouris_beta = o.paouris_beta;
  cfg.measure_samples = o.samples;
  cfg.max_outer_restarts = o.max_restarts;
  const WalkStrategy strategy(parse_walk_mode(o.mode));
  const Timer timer;
  const AsymResult r = color_asymmetric(body, sys, strategy, cfg);
  Json rep = make_report("color-asym",
                         {{"instance", o.instance},
                          {"body", o.body},
                          {"mode", o.mode},
                          {"alpha", cfg.alpha},
                          {"delta_rc", cfg.delta_rc},
                          {"epsilon_rc", cfg.epsilon_rc},
                          {"paouris_beta", cfg.paouris_beta},
                          {"max_outer_restarts", cfg.max_outer_restarts},
                          {"samples", cfg.measure_samples}},
                         o.seed);
  rep["instance_hash"] = instance_hash(sys);
  rep["outputs"] = coloring_outputs(sys, r.chi);
  rep["outputs"]["body_measure"] = measure_json(r.body_measure);
  rep["outputs"]["recentering"] = {{"iterations", r.recentering.iterations},
                                   {"descents", r.recentering.descents},
                                   {"face_dim", r.recentering.face.dim()},
                                   {"barycenter_norm", r.recentering.barycenter_norm},
                                   {"measure_before", measure_json(r.recentering.measure_before)},
                                   {"measure_after", measure_json(r.recentering.measure_after)}};
  rep["warnings"] = r.warnings;
  rep["stats"] = {{"attempts", r.attempts},
                  {"recenter_failures", r.recenter_failures},
                  {"strategy_failures", r.strategy_failures},
                  {"membership_rejections", r.membership_rejections},
                  {"wall_ms", timer.ms()}};
  return rep;
}

Json run_color_body_centric(const Options& o) {
  const VectorSystem sys = system_from_json(read_json_file(o.instance));
  const ConvexBody body = body_from_json(read_json_file(o.body));
  BodyCentricConfig cfg;
  cfg.seed = o.seed;
  cfg.paouris_beta = o.paouris_beta;
  cfg.measure_samples = o.samples;
  cfg.max_restarts = o.max_restarts;
  const Timer timer;
  const BodyCentricResult r = color_body_centric(body, sys, cfg);
  const Index n = sys.count();
  Json rep = make_report("color-body-centric",
                         {{"instance", o.instance},
                          {"body", o.body},
                          {"beta", cfg.beta},
                          {"alpha_n", cfg.alpha_n(n)},
                          {"eta_n", cfg.eta_n(n)},
                          {"epsilon_rc", cfg.epsilon_rc(n)},
                          {"v0", cfg.v0},
                          {"eta0", cfg.eta0},
                          {"c0", cfg.c0},
                          {"paouris_beta", cfg.paouris_beta},
                          {"max_restarts", cfg.max_restarts},
                          {"samples", cfg.measure_samples}},
                         o.seed);
  rep["instance_hash"] = instance_hash(sys);
  rep["outputs"] = coloring_outputs(sys, r.chi);
  rep["outputs"]["body_measure"] = measure_json(r.body_measure);
  rep["outputs"]["face_dims"] = dims_json(r.dims);
  rep["outputs"]["barycenter_norms"] = r.barycenter_norms;
  rep["warnings"] = r.warnings;
  rep["stats"] = {{"restarts", r.restarts}, {"descents", r.descents}, {"wall_ms", timer.ms()}};
  return rep;
}

Json run_solve_komlos(const Options& o) {
  const VectorSystem sys = system_from_json(read_json_file(o.instance));
  const Timer timer;
  const auto sol = solve_komlos(sys.vectors(), Eigen::VectorXd::Constant(sys.count(), o.alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(sol.X, Eigen::EigenvaluesOnly);
  Json x = Json::array();
  for (Index i = 0; i < sol.X.rows(); ++i) x.push_back(vector_to_json(sol.X.row(i).transpose()));
  Json rep = make_report("solve-komlos", {{"instance", o.instance}, {"alpha", o.alpha}}, o.seed);
  rep["instance_hash"] = instance_hash(sys);
  rep["outputs"] = {{"X", std::move(x)},
                    {"eig_max_VXVt", sol.eig_max_vxvt},
                    {"eig_min_X", sol.X.rows() ? ex.eigenvalues().minCoeff() : 0.0},
                    {"diagonal_error", sol.X.rows() ? (sol.X.diagonal() - sol.alpha).cwiseAbs().maxCoeff() : 0.0},
                    {"factor_error", (sol.U * sol.U.transpose() - sol.X).norm()}};
  rep["stats"] = {{"depth", sol.depth}, {"wall_ms", timer.ms()}};
  return rep;
}

Json run_verify(const Options& o) {
  Eigen::MatrixXd samples;
  if (o.input == "-") {
    samples = read_samples_csv(std::cin);
  } else {
    std::ifstream f(o.input);
    if (!f) throw PreconditionError("cannot open '" + o.input + "'");
    samples = read_samples_csv(f);
  }
  const Timer timer;
  SubgaussOptions so;
  so.directions = o.directions;
  SubgaussReport r = estimate_subgaussian(samples, o.seed, so);
  const LaplaceCertificate lc = laplace_certificate(samples, 32, o.sigma, derive_seed(o.seed, 1));
  r.laplace_beta = lc.beta;
  Json rep = make_report("verify-subgaussian",
                         {{"input", o.input}, {"directions", o.directions}, {"sigma_guess", o.sigma}}, o.seed);
  rep["outputs"] = {{"s_hat", r.s_hat},
                    {"worst_direction", vector_to_json(r.worst_direction)},
                    {"worst_threshold", r.worst_threshold},
                    {"laplace_beta", std::isfinite(lc.beta) ? Json(lc.beta) : Json(nullptr)},
                    {"laplace_implied_s", std::isfinite(lc.implied_s) ? Json(lc.implied_s) : Json(nullptr)},
                    {"laplace_cells_used", lc.cells_used},
                    {"laplace_cells_skipped", lc.cells_skipped}};
  if (!o.body.empty()) {
    const ConvexBody body = body_from_json(read_json_file(o.body));
    rep["outputs"]["coverage_crossing_scale"] = coverage_crossing_scale(samples, body);
  }
  rep["warnings"] = lc.warnings;
  rep["stats"] = {{"samples", r.samples}, {"wall_ms", timer.ms()}};
  return rep;
}

void run_bench_command(const Options& o) {
  BenchConfig cfg;
  cfg.sizes = o.sizes;
  cfg.families = o.families;
  cfg.algorithms = o.algorithms;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.mode = parse_walk_mode(o.mode);
  const auto rows = run_bench(cfg);
  if (o.out.empty() || o.out == "-") {
    write_bench_csv(std::cout, rows);
  } else {
    std::ofstream f(o.out);
    if (!f) throw PreconditionError("cannot write '" + o.out + "'");
    write_bench_csv(f, rows);
  }
}

void error_json(const char* kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vbal: vector balancing colorings inside convex bodies"};
  app.require_subcommand(1);
  Options o;
  std::function<void()> action;

  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed"); };
  auto out = [&](CLI::App* c) { c->add_option("--out", o.out, "output path (default: stdout)"); };
  auto instance = [&](CLI::App* c) { c->add_option("--instance", o.instance, "instance JSON")->required(); };
  auto body = [&](CLI::App* c) { c->add_option("--body", o.body, "body JSON")->required(); };
  auto pipeline = [&](CLI::App* c) {
    c->add_option("--paouris-beta", o.paouris_beta, "constant in the barycenter sample count");
    c->add_option("--samples", o.samples, "samples for Gaussian measure estimates (0 skips them)");
    c->add_option("--max-restarts", o.max_restarts, "restart budget");
  };

  for (const char* name : {"gen-beck-fiala", "gen-komlos", "gen-cube-body"}) {
    const std::string kind = name;
    CLI::App* c = app.add_subcommand(name, kind == "gen-cube-body" ? "write a cube body of given Gaussian measure"
                                                                   : "write a random instance");
    if (kind == "gen-cube-body") {
      c->add_option("--dim", o.dim, "dimension")->required();
      c->add_option("--target", o.target, "target Gaussian measure in (0, 1)")->required();
    } else {
      c->add_option("--n", o.n, "vector count")->required();
      c->add_option("--m", o.m, "dimension")->required();
      if (kind == "gen-beck-fiala") c->add_option("--t", o.t, "nonzeros per column")->required();
      else c->add_option("--norm-bound", o.norm_bound, "column norm");
      seed(c);
    }
    out(c);
    c->callback([&, kind] { action = [&, kind] { emit(o, run_generator(kind, o)); }; });
  }

  CLI::App* walk = app.add_subcommand("walk", "sample colorings with the random walk");
  instance(walk);
  seed(walk);
  out(walk);
  walk->add_option("--mode", o.mode, "paper or practical")->check(CLI::IsMember({"paper", "practical"}));
  walk->add_option("--trials", o.trials, "independent colorings");
  walk->add_option("--emit-samples", o.emit_samples, "write V chi - t rows as CSV ('-' for stdout)");
  walk->add_option("--max-restarts", o.max_restarts, "restart budget per coloring");
  walk->callback([&] {
    action = [&] {
      const Json rep = run_walk(o);
      if (o.emit_samples != "-" || (!o.out.empty() && o.out != "-")) emit(o, rep);
    };
  });

  CLI::App* rc = app.add_subcommand("recenter", "recenter a body and parallelepiped");
  instance(rc);
  body(rc);
  seed(rc);
  out(rc);
  pipeline(rc);
  rc->add_option("--delta", o.delta, "target barycenter norm");
  rc->add_option("--epsilon", o.epsilon, "failure probability");
  rc->callback([&] { action = [&] { emit(o, run_recenter(o)); }; });

  CLI::App* asym = app.add_subcommand("color-asym", "asymmetric pipeline around the walk");
  instance(asym);
  body(asym);
  seed(asym);
  out(asym);
  pipeline(asym);
  asym->add_option("--mode", o.mode, "walk mode for the symmetric solver")->check(CLI::IsMember({"paper", "practical"}));
  asym->callback([&] { action = [&] { emit(o, run_color_asym(o)); }; });

  CLI::App* bc = app.add_subcommand("color-body-centric", "deterministic body-centric coloring");
  instance(bc);
  body(bc);
  seed(bc);
  out(bc);
  pipeline(bc);
  bc->callback([&] { action = [&] { emit(o, run_color_body_centric(o)); }; });

  CLI::App* sk = app.add_subcommand("solve-komlos", "build X with diag(X) = alpha and V X V^T <= I");
  instance(sk);
  out(sk);
  sk->add_option("--alpha", o.alpha, "diagonal value in [0, 1]");
  sk->callback([&] { action = [&] { emit(o, run_solve_komlos(o)); }; });

  CLI::App* vs = app.add_subcommand("verify-subgaussian", "estimate the subgaussian parameter of samples");
  vs->add_option("--input", o.input, "sample CSV ('-' for stdin)");
  vs->add_option("--directions", o.directions, "random directions");
  vs->add_option("--sigma", o.sigma, "sigma guess for the Laplace test");
  vs->add_option("--body", o.body, "symmetric body JSON for the coverage scale");
  seed(vs);
  out(vs);
  vs->callback([&] { action = [&] { emit(o, run_verify(o)); }; });

  CLI::App* bench = app.add_subcommand("bench", "discrepancy benchmark matrix as CSV");
  bench->add_option("--sizes", o.sizes, "vector counts (m = n)")->delimiter(',');
  bench->add_option("--families", o.families, "komlos, beck-fiala, zero")->delimiter(',');
  bench->add_option("--algorithms", o.algorithms, "walk, random")->delimiter(',');
  bench->add_option("--mode", o.mode, "walk mode")->check(CLI::IsMember({"paper", "practical"}));
  o.trials = 1;
  bench->add_option("--trials", o.trials, "trials per cell");
  seed(bench);
  out(bench);
  bench->callback([&] { action = [&] { run_bench_command(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_json("usage", e.what());
    return 1;
  }

  try {
    action();
  } catch (const BudgetExhausted& e) {
    error_json(e.kind(), e.what());
    return 2;
  } catch (const Error& e) {
    error_json(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    error_json("internal", e.what());
    return 1;
  }
  return 0;
}
