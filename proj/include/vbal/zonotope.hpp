#pragma once

// Vector systems, fractional colorings and the face geometry of the
// parallelepiped P = sum_i [-v_i, v_i] - t.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "vbal/errors.hpp"

namespace vbal {

using Index = Eigen::Index;

/// Coordinates within this distance of +-1 are snapped and treated as fixed.
inline constexpr double kFractionalTol = 1e-9;
/// Singular values at or below this are treated as zero.
inline constexpr double kRankTol = 1e-10;
/// Dual coordinates within this distance of +-1 count as lying on a facet.
inline constexpr double kFaceTol = 1e-8;

/// Columns v_1..v_n in R^m together with a certificate lambda in [-1,1]^n.
/// The shift t = V * lambda is derived, never supplied.
class VectorSystem {
 public:
  VectorSystem(Eigen::MatrixXd vectors, Eigen::VectorXd lambda,
               std::optional<double> norm_bound = std::nullopt);

  /// System with lambda = 0 (so t = 0).
  explicit VectorSystem(Eigen::MatrixXd vectors);

  Index dim() const { return vectors_.rows(); }
  Index count() const { return vectors_.cols(); }

  const Eigen::MatrixXd& vectors() const { return vectors_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  const Eigen::VectorXd& shift() const { return shift_; }
  std::optional<double> norm_bound() const { return norm_bound_; }
  double max_column_norm() const;

  /// V * chi - t.
  Eigen::VectorXd residual(const Eigen::Ref<const Eigen::VectorXd>& chi) const;

 private:
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd shift_;
  std::optional<double> norm_bound_;
};

/// A point x in [-1,1]^n with its cached fractional set
/// A_x = { i : |x_i| < 1 - tol }. Entries within tol of +-1 are snapped.
class FractionalColoring {
 public:
  explicit FractionalColoring(Eigen::VectorXd x, double tol = kFractionalTol);

  const Eigen::VectorXd& values() const { return x_; }
  const std::vector<Index>& fractional() const { return fractional_; }
  double tolerance() const { return tol_; }
  Index size() const { return x_.size(); }
  bool is_integral() const { return fractional_.empty(); }

  void set(Index i, double value);

 private:
  void refresh();

  Eigen::VectorXd x_;
  std::vector<Index> fractional_;
  double tol_;
};

/// L_x(z): z on the fractional coordinates, x elsewhere. `indices` must equal A_x.
Eigen::VectorXd lift(const FractionalColoring& x, std::span<const Index> indices,
                     const Eigen::Ref<const Eigen::VectorXd>& z);
Eigen::VectorXd lift(const FractionalColoring& x, const Eigen::Ref<const Eigen::VectorXd>& z);

/// Basic feasible point of { y : V y = t, y in [-1,1]^n } reached by walking
/// along kernel directions of the fractional columns. The optional observer
/// sees every intermediate coloring.
FractionalColoring reduce_to_independent(
    const VectorSystem& sys,
    const std::function<void(const FractionalColoring&)>& observer = {});

/// Columns of V (V^T V)^{-1}: the vectors of span(V) biorthogonal to V's columns.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> dual_basis(
    const Eigen::MatrixBase<Derived>& basis) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix v = basis;
  const Index m = v.rows();
  const Index k = v.cols();
  if (k == 0) return Matrix(m, 0);
  if (k > m) throw SingularSystem("dual_basis: more columns than dimensions");
  Eigen::JacobiSVD<Matrix> svd(v);
  if (!(svd.singularValues()(k - 1) > Scalar(kRankTol)))
    throw SingularSystem("dual_basis: columns are linearly dependent");

  // V = QR  =>  V (V^T V)^{-1} = Q R^{-T}.
  Eigen::HouseholderQR<Matrix> qr(v);
  const Matrix q = qr.householderQ() * Matrix::Identity(m, k);
  const Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  const Matrix r_inv_t = r.transpose().template triangularView<Eigen::Lower>().solve(
      Matrix::Identity(k, k));
  return q * r_inv_t;
}

/// Point q of P together with the minimal face containing it.
///
/// q = V c - t where c is the coordinate vector: c_i = +-1 on fixed indices,
/// |c_i| < 1 on the active set A. The active columns are linearly
/// independent and W = span(v_i : i in A) is stored as an orthonormal basis.
/// Points p of W have dual coordinates <v_i*, p>, and q + p lies in the face
/// iff c_i + <v_i*, p> lies in [-1, 1] for every active i.
class FaceState {
 public:
  FaceState() = default;

  /// Face at q = V x - t for a coloring whose fractional columns are independent.
  static FaceState at_coloring(const VectorSystem& sys, const FractionalColoring& x);

  const Eigen::VectorXd& point() const { return point_; }
  const Eigen::VectorXd& coordinates() const { return coords_; }
  const std::vector<Index>& active() const { return active_; }
  std::map<Index, int> fixed_signs() const;
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& duals() const { return duals_; }
  Index dim() const { return static_cast<Index>(active_.size()); }
  bool is_vertex() const { return active_.empty(); }

  /// <v_i*, p> for the active indices, in active order.
  Eigen::VectorXd dual_coordinates(const Eigen::Ref<const Eigen::VectorXd>& p) const;

  /// Distance of p from W.
  double subspace_residual(const Eigen::Ref<const Eigen::VectorXd>& p) const;

 private:
  friend FaceState descend_face(const FaceState&, const VectorSystem&,
                                const Eigen::Ref<const Eigen::VectorXd>&);
  void rebuild(const VectorSystem& sys);

  Eigen::VectorXd point_;
  Eigen::VectorXd coords_;
  std::vector<Index> active_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd duals_;
};

struct BoundaryPoint {
  Eigen::VectorXd point;  ///< ambient coordinates, lies in W
  Index index = -1;       ///< vector whose facet is hit
  int sign = 0;           ///< the coordinate of `index` becomes `sign`
};

/// Minimum-norm point of the relative boundary of the current face
/// (translated so q is the origin).
BoundaryPoint min_norm_boundary_point(const FaceState& face, const VectorSystem& sys);

struct RayExit {
  double lambda = 1.0;
  bool hit = false;
};

/// Largest mu in (0, 1] with mu * b in the face; hit is false when b itself
/// lies strictly inside.
RayExit ray_exit(const FaceState& face, const VectorSystem& sys,
                 const Eigen::Ref<const Eigen::VectorXd>& direction);

/// Moves q to q + s and fixes every coordinate that reaches +-1.
FaceState descend_face(const FaceState& face, const VectorSystem& sys,
                       const Eigen::Ref<const Eigen::VectorXd>& step);

}  // namespace vbal
