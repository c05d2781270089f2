#pragma once

// Membership-oracle convex bodies and the Monte-Carlo estimators built on them.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vbal/errors.hpp"

namespace vbal {

using Index = Eigen::Index;

/// Default constant in the barycenter sample count.
inline constexpr double kDefaultPaourisBeta = 3.0;

/// Immutable, cheaply copyable convex body given by a membership oracle.
/// Composite bodies keep their children and evaluate lazily.
class ConvexBody {
 public:
  using Predicate = std::function<bool(const Eigen::Ref<const Eigen::VectorXd>&)>;

  enum class Kind { space, halfspace, ball, cube, intersection, shifted, scaled, symmetrized, slice, custom };

  /// All of R^dim.
  static ConvexBody space(Index dim);
  /// { x : <normal, x> <= offset }.
  static ConvexBody halfspace(Eigen::VectorXd normal, double offset);
  static ConvexBody ball(Eigen::VectorXd center, double radius);
  /// [-scale, scale]^dim + shift (shift defaults to 0).
  static ConvexBody cube(Index dim, double scale, Eigen::VectorXd shift = {});
  static ConvexBody intersection(std::vector<ConvexBody> parts);
  /// Wraps a user predicate; convexity is the caller's promise (see convexity_violations).
  static ConvexBody custom(Index dim, Predicate membership);

  Index dim() const;
  Kind kind() const;
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Structural view, for serialization. Which fields are meaningful depends on kind():
  // vector_param is the normal, center, cube shift, shift p or slice offset;
  // scalar_param the offset, radius, cube scale or scale factor.
  const Eigen::VectorXd& vector_param() const;
  double scalar_param() const;
  const Eigen::MatrixXd& slice_basis() const;
  const std::vector<ConvexBody>& children() const;

  struct Node;

 private:
  explicit ConvexBody(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend ConvexBody shifted(const ConvexBody&, Eigen::VectorXd);
  friend ConvexBody scaled(const ConvexBody&, double);
  friend ConvexBody symmetrize(const ConvexBody&);
  friend ConvexBody restrict(const ConvexBody&, Eigen::MatrixXd, Eigen::VectorXd);

  std::shared_ptr<const Node> node_;
};

/// K + p.
ConvexBody shifted(const ConvexBody& body, Eigen::VectorXd p);
/// c K for c > 0.
ConvexBody scaled(const ConvexBody& body, double c);
/// K intersected with -K.
ConvexBody symmetrize(const ConvexBody& body);
/// { y in R^k : p + basis y in K } for an orthonormal m x k basis.
ConvexBody restrict(const ConvexBody& body, Eigen::MatrixXd basis, Eigen::VectorXd p);

struct MeasureEstimate {
  double p_hat = 0.0;
  std::int64_t samples = 0;
  double ci_halfwidth = 0.0;  ///< 1.96 sqrt(p (1 - p) / samples)
  std::uint64_t seed = 0;
};

/// Fraction of standard Gaussian draws landing in K.
MeasureEstimate gaussian_measure(const ConvexBody& body, std::int64_t n_samples, std::uint64_t seed);

/// Half-width for comparing two independent estimates.
double combined_ci(const MeasureEstimate& a, const MeasureEstimate& b);

struct BarycenterEstimate {
  Eigen::VectorXd b_hat;
  double delta = 0.0;
  double epsilon = 0.0;
  std::int64_t samples_used = 0;
  std::int64_t attempts_per_sample = 0;
  std::int64_t rejection_failures = 0;  ///< Gaussian draws that missed K
};

/// N = ceil((beta/delta)^2 ln^2(e/epsilon) d).
std::int64_t barycenter_sample_count(Index dim, double delta, double epsilon,
                                     double paouris_beta = kDefaultPaourisBeta);
/// k = ceil(log2(2N/epsilon)).
std::int64_t barycenter_attempts(std::int64_t samples, double epsilon);

/// Mean of N Gaussian points conditioned on K, each drawn by rejection with
/// at most k tries. Throws RejectionExhausted when some point gets none.
BarycenterEstimate barycenter(const ConvexBody& body, double delta, double epsilon, std::uint64_t seed,
                              double paouris_beta = kDefaultPaourisBeta);

struct GaugeValue {
  double value = 0.0;
  bool unbounded = false;  ///< the ray from 0 through x never leaves K
};

/// inf { s >= 0 : x in s K } for K with 0 in its interior.
GaugeValue gauge_norm(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x,
                      double tol = 1e-8);

/// Midpoint failures among `pairs` pairs of Gaussian points inside K.
std::int64_t convexity_violations(const ConvexBody& body, std::int64_t pairs, std::uint64_t seed);

/// Gaussian probes x where membership(x) differs from membership(-x).
std::int64_t symmetry_violations(const ConvexBody& body, std::int64_t probes, std::uint64_t seed);

}  // namespace vbal
