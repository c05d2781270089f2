#pragma once

// SDP-free construction of a PSD matrix X with prescribed diagonal alpha and
// V X V^T <= I, by recursion on the number of columns.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "vbal/errors.hpp"
#include "vbal/zonotope.hpp"

namespace vbal {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct KomlosSolution {
  DenseMatrix<Scalar> X;      ///< n x n PSD, diag(X) = alpha
  DenseMatrix<Scalar> U;      ///< U U^T = X
  DenseVector<Scalar> alpha;  ///< prescribed diagonal
  Scalar eig_max_vxvt = 0;    ///< certified largest eigenvalue of V X V^T
  int depth = 0;              ///< recursion levels used
};

namespace komlos_detail {

inline constexpr double kNormSlack = 1e-10;
inline constexpr double kAlphaDrop = 1e-12;
inline constexpr double kGammaStop = 1e-12;
inline constexpr double kPivotTol = 1e-10;
inline constexpr double kNotPsdTol = 1e-6;
inline constexpr double kFactorTol = 1e-7;

template <typename Scalar>
DenseMatrix<Scalar> columns(const DenseMatrix<Scalar>& v, const std::vector<Index>& idx) {
  DenseMatrix<Scalar> out(v.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = v.col(idx[j]);
  return out;
}

/// Tolerances are stated for double; narrower scalars get a floor of 1024 ulp.
template <typename Scalar>
Scalar tolerance(double base) {
  return std::max(Scalar(base), Scalar(1024) * std::numeric_limits<Scalar>::epsilon());
}

template <typename Scalar>
Scalar factor_error(const DenseMatrix<Scalar>& u, const DenseMatrix<Scalar>& x) {
  return (u * u.transpose() - x).norm();
}

}  // namespace komlos_detail

/// B = (V^T V)^{-1} for linearly independent columns.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> gram_inverse(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Index k = v.cols();
  if (k == 0) return DenseMatrix<Scalar>(0, 0);
  if (k > v.rows()) throw SingularSystem("gram_inverse: more columns than dimensions");
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(v.eval(), Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s(k - 1) > Scalar(kRankTol))) throw SingularSystem("gram_inverse: V^T V is singular");
  const DenseMatrix<Scalar> w = svd.matrixV() * s.cwiseInverse().asDiagonal();
  return w * w.transpose();
}

/// U with U U^T = X for symmetric PSD X.
///
/// Diagonal-pivoted Cholesky; falls back to a clamped eigendecomposition if
/// the pivoted factor does not reproduce X. Rows of U belonging to zero
/// diagonal entries of X are exactly zero.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> psd_factor(const Eigen::MatrixBase<Derived>& x_in) {
  using Scalar = typename Derived::Scalar;
  using Matrix = DenseMatrix<Scalar>;
  namespace kd = komlos_detail;
  const Matrix x = x_in;
  const Index n = x.rows();
  if (x.cols() != n) throw ContractViolation("psd_factor: matrix is not square");
  if (n == 0) return Matrix(0, 0);
  const Scalar scale = Scalar(1) + x.norm();
  if ((x - x.transpose()).norm() > kd::tolerance<Scalar>(1e-10) * scale)
    throw ContractViolation("psd_factor: matrix is not symmetric");

  Matrix u = Matrix::Zero(n, n);
  DenseVector<Scalar> d = x.diagonal();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index col = 0; col < n; ++col) {
    Index piv = -1;
    Scalar best = Scalar(kd::kPivotTol);
    for (Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)] && d[i] > best) {
        best = d[i];
        piv = i;
      }
    }
    if (piv < 0) break;
    const Scalar root = std::sqrt(d[piv]);
    used[static_cast<std::size_t>(piv)] = true;
    u(piv, col) = root;
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const Scalar dot = col == 0 ? Scalar(0) : Scalar(u.row(i).head(col).dot(u.row(piv).head(col)));
      u(i, col) = (x(i, piv) - dot) / root;
      d[i] -= u(i, col) * u(i, col);
    }
  }

  if (kd::factor_error(u, x) > kd::tolerance<Scalar>(kd::kFactorTol) * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    DenseVector<Scalar> ev = es.eigenvalues();
    if (ev.minCoeff() < -Scalar(kd::kNotPsdTol)) {
      std::ostringstream msg;
      msg << "psd_factor: smallest eigenvalue " << ev.minCoeff() << " is below -1e-6";
      throw NotPsd(msg.str());
    }
    for (Index i = 0; i < n; ++i) ev[i] = ev[i] < Scalar(kd::kPivotTol) ? Scalar(0) : std::sqrt(ev[i]);
    u = es.eigenvectors() * ev.asDiagonal();
  }
  for (Index i = 0; i < n; ++i)
    if (x(i, i) == Scalar(0)) u.row(i).setZero();
  return u;
}

/// PSD X with X_ii = alpha_i and V X V^T <= I, for columns of norm at most 1.
///
/// Each level removes one column. If the remaining columns are dependent, a
/// kernel vector x (scaled so x_i^2 <= alpha_i with equality at some k)
/// contributes x x^T. Otherwise B = (V^T V)^{-1} contributes beta * B with
/// beta = min_i alpha_i / B_ii, and the rest is solved for the rescaled
/// residual diagonal. Coordinates whose remaining alpha is <= 1e-12 are
/// dropped at every level; their rows of X stay zero.
template <typename DV, typename DA>
KomlosSolution<typename DV::Scalar> solve_komlos(const Eigen::MatrixBase<DV>& v_in,
                                                 const Eigen::MatrixBase<DA>& alpha_in) {
  using Scalar = typename DV::Scalar;
  using Matrix = DenseMatrix<Scalar>;
  using Vector = DenseVector<Scalar>;
  static_assert(std::is_floating_point_v<Scalar>, "solve_komlos needs a floating-point scalar");
  namespace kd = komlos_detail;

  const Matrix v = v_in;
  const Vector alpha = alpha_in;
  const Index n = v.cols();
  const Index m = v.rows();
  if (alpha.size() != n) throw PreconditionError("solve_komlos: alpha length does not match V");
  for (Index i = 0; i < n; ++i) {
    if (!(v.col(i).norm() <= Scalar(1) + Scalar(kd::kNormSlack))) {
      std::ostringstream msg;
      msg << "solve_komlos: column " << i << " has norm " << v.col(i).norm() << " > 1";
      throw PreconditionError(msg.str());
    }
    if (!(alpha[i] >= Scalar(0) && alpha[i] <= Scalar(1)))
      throw PreconditionError("solve_komlos: alpha must lie in [0, 1]");
  }

  Matrix x = Matrix::Zero(n, n);
  Vector a = alpha;
  std::vector<Index> rem;
  for (Index i = 0; i < n; ++i) rem.push_back(i);
  Scalar scale = 1;
  int depth = 0;
  bool independent = false;

  auto add_block = [&](const Matrix& block, Scalar weight) {
    for (std::size_t p = 0; p < rem.size(); ++p)
      for (std::size_t q = 0; q < rem.size(); ++q)
        x(rem[p], rem[q]) += weight * block(static_cast<Index>(p), static_cast<Index>(q));
  };

  while (true) {
    std::erase_if(rem, [&](Index i) { return a[i] <= Scalar(kd::kAlphaDrop); });
    if (rem.empty()) break;
    ++depth;
    const Matrix sub = kd::columns(v, rem);
    const Index k = sub.cols();

    if (!independent) {
      Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
      if (k > m || !(svd.singularValues()(k - 1) > Scalar(kRankTol))) {
        Vector ker = svd.matrixV().col(k - 1);
        const Scalar cutoff = Scalar(1e-13) * ker.cwiseAbs().maxCoeff();
        Scalar factor = std::numeric_limits<Scalar>::infinity();
        Index pivot = -1;
        for (Index j = 0; j < k; ++j) {
          if (std::abs(ker[j]) <= cutoff) {
            ker[j] = 0;
            continue;
          }
          const Scalar ratio = std::sqrt(a[rem[static_cast<std::size_t>(j)]]) / std::abs(ker[j]);
          if (ratio < factor) {
            factor = ratio;
            pivot = j;
          }
        }
        ker *= factor;
        add_block(ker * ker.transpose(), scale);
        for (Index j = 0; j < k; ++j) {
          Scalar& aj = a[rem[static_cast<std::size_t>(j)]];
          aj = std::max(Scalar(0), aj - ker[j] * ker[j]);
        }
        a[rem[static_cast<std::size_t>(pivot)]] = 0;
        rem.erase(rem.begin() + pivot);
        continue;
      }
      independent = true;
    }

    Matrix b = (sub.transpose() * sub).llt().solve(Matrix::Identity(k, k));
    b = (b + b.transpose()) / Scalar(2);
    Scalar beta = std::numeric_limits<Scalar>::infinity();
    Index pivot = -1;
    for (Index j = 0; j < k; ++j) {
      const Scalar ratio = a[rem[static_cast<std::size_t>(j)]] / b(j, j);
      if (ratio < beta) {
        beta = ratio;
        pivot = j;
      }
    }
    Scalar gamma = 0;
    for (Index j = 0; j < k; ++j)
      gamma = std::max(gamma, a[rem[static_cast<std::size_t>(j)]] - beta * b(j, j));
    add_block(b, scale * beta);
    if (gamma <= Scalar(kd::kGammaStop)) break;
    for (Index j = 0; j < k; ++j) {
      Scalar& aj = a[rem[static_cast<std::size_t>(j)]];
      aj = std::max(Scalar(0), (aj - beta * b(j, j)) / gamma);
    }
    a[rem[static_cast<std::size_t>(pivot)]] = 0;
    scale *= gamma;
    rem.erase(rem.begin() + pivot);
  }

  x = (x + x.transpose()) / Scalar(2);

  KomlosSolution<Scalar> sol;
  sol.alpha = alpha;
  sol.depth = depth;
  std::ostringstream diag;
  const Scalar diag_err = n == 0 ? Scalar(0) : (x.diagonal() - alpha).cwiseAbs().maxCoeff();
  if (diag_err > kd::tolerance<Scalar>(1e-8)) diag << " diagonal error " << diag_err << ";";
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> ex(x, Eigen::EigenvaluesOnly);
    if (ex.eigenvalues().minCoeff() < -kd::tolerance<Scalar>(1e-8))
      diag << " lambda_min(X) = " << ex.eigenvalues().minCoeff() << ";";
    if (m > 0) {
      const Matrix vxv = v * x * v.transpose();
      Eigen::SelfAdjointEigenSolver<Matrix> ev((vxv + vxv.transpose()) / Scalar(2),
                                               Eigen::EigenvaluesOnly);
      sol.eig_max_vxvt = ev.eigenvalues().maxCoeff();
    }
  }
  if (sol.eig_max_vxvt > Scalar(1) + kd::tolerance<Scalar>(1e-7))
    diag << " lambda_max(V X V^T) = " << sol.eig_max_vxvt << ";";
  if (!diag.str().empty())
    throw NumericalError("solve_komlos: certification failed:" + diag.str());

  sol.U = psd_factor(x);
  const Scalar ferr = komlos_detail::factor_error(sol.U, x);
  if (ferr > kd::tolerance<Scalar>(kd::kFactorTol) * (Scalar(1) + x.norm())) {
    std::ostringstream msg;
    msg << "solve_komlos: factor error " << ferr;
    throw NumericalError(msg.str());
  }
  sol.X = std::move(x);
  return sol;
}

}  // namespace vbal
