#pragma once

// Instance generators and the discrepancy benchmark matrix.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vbal/convex.hpp"
#include "vbal/walk.hpp"
#include "vbal/zonotope.hpp"

namespace vbal {

/// Each column has exactly t entries equal to 1/sqrt(t), in distinct random rows.
VectorSystem gen_beck_fiala(Index n, Index m, Index t, std::uint64_t seed);

/// Uniformly random directions scaled to norm_bound.
VectorSystem gen_komlos(Index n, Index m, double norm_bound, std::uint64_t seed);

/// a = Phi^{-1}((1 + target^{1/dim}) / 2), so [-a, a]^dim has measure target.
double cube_half_width(Index dim, double target_measure);
ConvexBody gen_cube_body(Index dim, double target_measure);

/// Lowest l-infinity residual among `draws` uniformly random colorings.
double best_random_linf(const VectorSystem& sys, int draws, std::uint64_t seed);

struct BenchConfig {
  std::vector<std::string> algorithms{"walk", "random"};
  std::vector<std::string> families{"komlos", "beck-fiala", "zero"};
  std::vector<Index> sizes{4, 8, 16};
  int trials = 10;
  std::uint64_t seed = 0;
  WalkMode mode = WalkMode::practical;
  Index sparsity = 3;  ///< nonzeros per Beck-Fiala column (capped at m)
};

struct BenchRow {
  std::string algorithm;
  std::string family;
  Index n = 0;
  Index m = 0;
  int trials = 0;
  double mean_linf = 0.0;
  double median_linf = 0.0;
  double max_linf = 0.0;
  double mean_l2 = 0.0;
  double baseline_best_linf = 0.0;  ///< mean over trials of the best-of-64 random coloring
  double mean_restarts = 0.0;
  double wall_ms = 0.0;
};

/// Square instances (m = n). Trials run concurrently with per-trial seeds.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

/// Header: algorithm,family,n,m,trials,mean_linf,median_linf,max_linf,mean_l2,
/// baseline_best_linf,mean_restarts,wall_ms
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace vbal
