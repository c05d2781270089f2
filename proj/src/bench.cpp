#include "vbal/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <numeric>
#include <ostream>

#include "vbal/normal.hpp"
#include "vbal/rng.hpp"

namespace vbal {

namespace {

struct Trial {
  double linf = 0.0;
  double l2 = 0.0;
  double baseline = 0.0;
  int restarts = 0;
};

VectorSystem make_instance(const std::string& family, Index n, Index sparsity, std::uint64_t seed) {
  if (family == "komlos") return gen_komlos(n, n, 1.0, seed);
  if (family == "beck-fiala") return gen_beck_fiala(n, n, std::min(sparsity, n), seed);
  if (family == "zero") return VectorSystem(Eigen::MatrixXd::Zero(n, n));
  throw PreconditionError("bench: unknown instance family '" + family + "'");
}

Trial run_trial(const std::string& algorithm, const VectorSystem& sys, WalkMode mode, std::uint64_t seed) {
  Trial t;
  Eigen::VectorXd chi;
  if (algorithm == "walk") {
    WalkParams p = walk_params(sys.count(), mode);
    p.seed = derive_seed(seed, 1);
    const WalkTrace trace = sample_coloring(sys, p);
    chi = trace.chi;
    t.restarts = trace.restarts;
  } else if (algorithm == "random") {
    CounterRng rng(seed, 1);
    chi.resize(sys.count());
    fill_rademacher(rng, chi);
  } else {
    throw PreconditionError("bench: unknown algorithm '" + algorithm + "'");
  }
  const Eigen::VectorXd r = sys.residual(chi);
  t.linf = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  t.l2 = r.norm();
  t.baseline = best_random_linf(sys, 64, derive_seed(seed, 2));
  return t;
}

}  // namespace

VectorSystem gen_beck_fiala(Index n, Index m, Index t, std::uint64_t seed) {
  if (n < 1 || m < 1 || t < 1 || t > m) throw PreconditionError("gen_beck_fiala: need n, m >= 1 and 1 <= t <= m");
  CounterRng rng(seed);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, n);
  std::vector<Index> rows(static_cast<std::size_t>(m));
  const double value = 1.0 / std::sqrt(static_cast<double>(t));
  for (Index i = 0; i < n; ++i) {
    std::iota(rows.begin(), rows.end(), Index{0});
    // Partial Fisher-Yates: the first t rows are a uniform t-subset.
    for (Index k = 0; k < t; ++k) {
      const auto span = static_cast<std::uint64_t>(m - k);
      const Index j = k + static_cast<Index>(rng() % span);
      std::swap(rows[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(j)]);
      v(rows[static_cast<std::size_t>(k)], i) = value;
    }
  }
  return VectorSystem(std::move(v), Eigen::VectorXd::Zero(n), 1.0);
}

VectorSystem gen_komlos(Index n, Index m, double norm_bound, std::uint64_t seed) {
  if (n < 1 || m < 1) throw PreconditionError("gen_komlos: need n, m >= 1");
  if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) throw PreconditionError("gen_komlos: bad norm bound");
  GaussianSource g(seed);
  Eigen::MatrixXd v(m, n);
  for (Index i = 0; i < n; ++i) v.col(i) = norm_bound * g.direction(m);
  return VectorSystem(std::move(v), Eigen::VectorXd::Zero(n), norm_bound);
}

double cube_half_width(Index dim, double target_measure) {
  if (dim < 1) throw PreconditionError("gen_cube_body: dim must be at least 1");
  if (!(target_measure > 0.0 && target_measure < 1.0))
    throw PreconditionError("gen_cube_body: target measure must lie in (0, 1)");
  const double per_axis = std::pow(target_measure, 1.0 / static_cast<double>(dim));
  const double p = 0.5 * (1.0 + per_axis);
  if (!(p < 1.0 - 1e-15)) throw PreconditionError("gen_cube_body: target measure too close to 1");
  const double a = normal_quantile(p);
  const double mass = std::pow(std::erf(a / std::sqrt(2.0)), static_cast<double>(dim));
  if (std::abs(mass - target_measure) > 1e-12)
    throw NumericalError("gen_cube_body: half-width does not reproduce the target measure");
  return a;
}

ConvexBody gen_cube_body(Index dim, double target_measure) {
  return ConvexBody::cube(dim, cube_half_width(dim, target_measure));
}

double best_random_linf(const VectorSystem& sys, int draws, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::VectorXd chi(sys.count());
  double best = std::numeric_limits<double>::infinity();
  for (int d = 0; d < draws; ++d) {
    fill_rademacher(rng, chi);
    const Eigen::VectorXd r = sys.residual(chi);
    best = std::min(best, r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
  }
  return best;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.trials < 1) throw PreconditionError("bench: need at least one trial");
  std::vector<BenchRow> rows;
  for (const auto& family : cfg.families) {
    for (Index n : cfg.sizes) {
      if (n < 1) throw PreconditionError("bench: sizes must be positive");
      for (const auto& algorithm : cfg.algorithms) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<std::future<Trial>> pending;
        for (int k = 0; k < cfg.trials; ++k) {
          const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
          pending.push_back(std::async(std::launch::async, [&, s] {
            return run_trial(algorithm, make_instance(family, n, cfg.sparsity, s), cfg.mode, s);
          }));
        }
        std::vector<Trial> trials;
        for (auto& f : pending) trials.push_back(f.get());  // in trial order

        BenchRow row;
        row.algorithm = algorithm;
        row.family = family;
        row.n = n;
        row.m = n;
        row.trials = cfg.trials;
        std::vector<double> linf;
        for (const Trial& t : trials) {
          linf.push_back(t.linf);
          row.mean_linf += t.linf;
          row.mean_l2 += t.l2;
          row.baseline_best_linf += t.baseline;
          row.mean_restarts += t.restarts;
          row.max_linf = std::max(row.max_linf, t.linf);
        }
        const double k = static_cast<double>(cfg.trials);
        row.mean_linf /= k;
        row.mean_l2 /= k;
        row.baseline_best_linf /= k;
        row.mean_restarts /= k;
        std::sort(linf.begin(), linf.end());
        const std::size_t mid = linf.size() / 2;
        row.median_linf = linf.size() % 2 ? linf[mid] : 0.5 * (linf[mid - 1] + linf[mid]);
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "algorithm,family,n,m,trials,mean_linf,median_linf,max_linf,mean_l2,baseline_best_linf,mean_restarts,"
         "wall_ms\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.family << ',' << r.n << ',' << r.m << ',' << r.trials << ',' << num(r.mean_linf)
        << ',' << num(r.median_linf) << ',' << num(r.max_linf) << ',' << num(r.mean_l2) << ','
        << num(r.baseline_best_linf) << ',' << num(r.mean_restarts) << ',' << num(r.wall_ms) << '\n';
  }
}

}  // namespace vbal
