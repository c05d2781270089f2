#pragma once

// Shifts a (body, parallelepiped) pair, descending faces of P when the shift
// would leave it, until the Gaussian barycenter of the restricted body
// (K - q) ∩ W is small.

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "vbal/convex.hpp"
#include "vbal/zonotope.hpp"

namespace vbal {

struct RecenterOptions {
  double delta = 0.05;
  double epsilon = 0.05;
  double paouris_beta = kDefaultPaourisBeta;
  /// Samples for the before/after measure estimates; 0 skips them.
  std::int64_t measure_samples = 20000;
};

enum class RecenterStatus { ok, fail };

struct RecenterResult {
  RecenterStatus status = RecenterStatus::fail;
  std::string fail_reason;
  Eigen::VectorXd q;
  FaceState face;
  std::int64_t iterations = 0;
  int descents = 0;
  MeasureEstimate measure_before;  ///< of (K - q0) ∩ W at the start
  MeasureEstimate measure_after;   ///< of (K - q) ∩ W at the end
  double barycenter_norm = 0.0;    ///< norm of the last barycenter estimate
  std::int64_t barycenter_samples = 0;

  bool ok() const { return status == RecenterStatus::ok; }
};

/// At most ceil(24/delta^2) + n iterations, each estimating the barycenter
/// to accuracy delta/6 with failure probability epsilon/N.
RecenterResult recenter(const ConvexBody& body, const VectorSystem& sys, const FaceState& start,
                        const RecenterOptions& options, std::uint64_t seed);

/// Starts from the face of the independent basic point of sys (q = 0).
RecenterResult recenter(const ConvexBody& body, const VectorSystem& sys, double delta, double epsilon,
                        std::uint64_t seed);

}  // namespace vbal
