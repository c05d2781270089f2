#pragma once

// Full colorings landing in a convex body: the asymmetric-to-symmetric
// reduction around a pluggable symmetric solver, and the deterministic
// body-centric descent.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vbal/convex.hpp"
#include "vbal/recenter.hpp"
#include "vbal/walk.hpp"
#include "vbal/zonotope.hpp"

namespace vbal {

/// A coloring algorithm for symmetric bodies on parallelepipeds whose side
/// lengths (2 max ||v_i||) are at most side_length_bound(n).
class SymmetricStrategy {
 public:
  virtual ~SymmetricStrategy() = default;
  virtual std::string_view name() const = 0;
  virtual double side_length_bound(Index n) const = 0;
  /// Returns chi in {-1, 1}^n for `local` (lambda is the starting point).
  virtual Eigen::VectorXd color(const VectorSystem& local, const ConvexBody& symmetric_body,
                                std::uint64_t seed) const = 0;
};

/// The subgaussian walk; ignores the body and relies on the caller's check.
/// Bound l(n) = min(2c / sqrt(ln n), 2), which keeps vector norms at most 1.
class WalkStrategy final : public SymmetricStrategy {
 public:
  explicit WalkStrategy(WalkMode mode = WalkMode::practical, double c = 1.0);
  std::string_view name() const override { return "walk"; }
  double side_length_bound(Index n) const override;
  Eigen::VectorXd color(const VectorSystem& local, const ConvexBody& symmetric_body,
                        std::uint64_t seed) const override;

 private:
  WalkMode mode_;
  double c_;
};

double asym_alpha();     ///< 4 (1 + pi sqrt(8 ln 2))
double asym_delta_rc();  ///< 1 / (32 sqrt(2 pi))

struct AsymPipelineConfig {
  double alpha = asym_alpha();
  double delta_rc = asym_delta_rc();
  double epsilon_rc = 0.25;
  int max_outer_restarts = 64;
  std::uint64_t seed = 0;
  double paouris_beta = kDefaultPaourisBeta;
  std::int64_t measure_samples = 20000;
};

struct AsymResult {
  Eigen::VectorXd chi;
  Eigen::VectorXd vertex;  ///< V chi - t, verified inside K
  int attempts = 0;        ///< outer attempts used, including the accepted one
  int recenter_failures = 0;
  int strategy_failures = 0;
  int membership_rejections = 0;
  MeasureEstimate body_measure;
  RecenterResult recentering;  ///< from the accepted attempt
  std::vector<std::string> warnings;
};

AsymResult color_asymmetric(const ConvexBody& body, const VectorSystem& sys, const SymmetricStrategy& strategy,
                            const AsymPipelineConfig& cfg = {});

double body_centric_beta();  ///< 1 + pi sqrt(8 ln 2) + 4 pi sqrt(ln 2)
double body_centric_c0();    ///< 1 / Phi^{-1}(0.6)

struct BodyCentricConfig {
  double beta = body_centric_beta();
  double c0 = body_centric_c0();
  double v0 = 0.1;
  double eta0 = 1.0 / (10.0 * body_centric_c0());
  int max_restarts = 64;
  std::uint64_t seed = 0;
  double paouris_beta = kDefaultPaourisBeta;
  std::int64_t measure_samples = 20000;

  double alpha_n(Index n) const;     ///< min(v0, 1 / (10 sqrt(ln 2n)))
  double eta_n(Index n) const;       ///< min(eta0, 1 / (32 sqrt(2 pi)), 1 / (14 c0 n))
  double epsilon_rc(Index n) const;  ///< 1 / (2 (n + 1))
};

struct BodyCentricResult {
  Eigen::VectorXd chi;
  Eigen::VectorXd vertex;
  int restarts = 0;
  int descents = 0;                  ///< faces left, in the accepted attempt
  std::vector<Index> dims;           ///< dim W after every recentering or descent
  std::vector<double> barycenter_norms;
  MeasureEstimate body_measure;
  std::vector<std::string> warnings;
};

BodyCentricResult color_body_centric(const ConvexBody& body, const VectorSystem& sys,
                                     const BodyCentricConfig& cfg = {});

}  // namespace vbal
