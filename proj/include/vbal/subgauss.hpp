#pragma once

// Empirical subgaussianity checks on a sample matrix (one sample per row).

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vbal/convex.hpp"

namespace vbal {

struct SubgaussOptions {
  int directions = 256;
  int thresholds = 32;        ///< geometric grid over [0.1 sigma, 5 sigma]
  std::int64_t min_exceedances = 20;
};

struct SubgaussReport {
  double s_hat = 0.0;
  int directions = 0;
  std::int64_t samples = 0;
  Eigen::VectorXd worst_direction;  ///< empty when no cell contributed
  double worst_threshold = 0.0;
  double laplace_beta = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

/// Largest t / sqrt(2 ln(2 / p)) over (direction, threshold) cells with
/// enough exceedances, p being the empirical tail Pr[|<theta, X>| >= t].
SubgaussReport estimate_subgaussian(const Eigen::MatrixXd& samples, std::uint64_t seed,
                                    const SubgaussOptions& options = {});

/// The candidate of one cell; NaN when the cell has too few exceedances.
double tail_candidate(const Eigen::MatrixXd& samples, const Eigen::Ref<const Eigen::VectorXd>& direction,
                      double threshold, std::int64_t min_exceedances = 20);

struct LaplaceCertificate {
  double beta = std::numeric_limits<double>::infinity();
  double implied_s = std::numeric_limits<double>::infinity();
  int cells_used = 0;
  int cells_skipped = 0;  ///< too noisy to trust
  std::vector<std::string> warnings;
};

/// beta = max over w of mean cosh(<w, X>) / exp(||sigma w||^2 / 2) for random
/// directions and ||w|| in {0.25, 0.5, 1, 2, 4} / sigma. Cells whose sample
/// relative standard error exceeds max_relative_se are skipped; magnitudes
/// that would overflow cosh are dropped with a warning.
LaplaceCertificate laplace_certificate(const Eigen::MatrixXd& samples, int n_directions, double sigma_guess,
                                       std::uint64_t seed, double max_relative_se = 0.05);

/// Fraction of samples x with x / scale_c in K. K must pass a symmetry spot-check.
double coverage_test(const Eigen::MatrixXd& samples, const ConvexBody& body, double scale_c,
                     std::uint64_t seed = 0);

/// Smallest c with coverage_test(samples, K, c) >= 1/2: the median gauge norm.
double coverage_crossing_scale(const Eigen::MatrixXd& samples, const ConvexBody& body);

}  // namespace vbal
