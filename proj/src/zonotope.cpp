#include "vbal/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace vbal {

namespace {

constexpr double kLambdaSlack = 1e-12;

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<Index>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = m.col(idx[j]);
  return out;
}

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// VectorSystem

VectorSystem::VectorSystem(Eigen::MatrixXd vectors, Eigen::VectorXd lambda,
                           std::optional<double> norm_bound)
    : vectors_(std::move(vectors)), lambda_(std::move(lambda)), norm_bound_(norm_bound) {
  if (lambda_.size() != vectors_.cols())
    throw PreconditionError("VectorSystem: lambda length does not match vector count");
  if (!vectors_.allFinite() || !lambda_.allFinite())
    throw PreconditionError("VectorSystem: non-finite entries");
  for (Index i = 0; i < lambda_.size(); ++i) {
    if (std::abs(lambda_[i]) > 1.0 + kLambdaSlack) {
      std::ostringstream msg;
      msg << "VectorSystem: lambda[" << i << "] = " << lambda_[i] << " lies outside [-1, 1]";
      throw PreconditionError(msg.str());
    }
    lambda_[i] = std::clamp(lambda_[i], -1.0, 1.0);
  }
  if (norm_bound_) {
    for (Index i = 0; i < vectors_.cols(); ++i) {
      if (vectors_.col(i).norm() > *norm_bound_ * (1.0 + kLambdaSlack)) {
        std::ostringstream msg;
        msg << "VectorSystem: column " << i << " exceeds the declared norm bound " << *norm_bound_;
        throw PreconditionError(msg.str());
      }
    }
  }
  shift_ = vectors_ * lambda_;
}

VectorSystem::VectorSystem(Eigen::MatrixXd vectors)
    : VectorSystem(vectors, Eigen::VectorXd::Zero(vectors.cols())) {}

double VectorSystem::max_column_norm() const {
  return vectors_.cols() == 0 ? 0.0 : vectors_.colwise().norm().maxCoeff();
}

Eigen::VectorXd VectorSystem::residual(const Eigen::Ref<const Eigen::VectorXd>& chi) const {
  if (chi.size() != count()) throw ContractViolation("residual: coloring has the wrong length");
  return vectors_ * chi - shift_;
}

// ---------------------------------------------------------------------------
// FractionalColoring

FractionalColoring::FractionalColoring(Eigen::VectorXd x, double tol)
    : x_(std::move(x)), tol_(tol) {
  for (Index i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || std::abs(x_[i]) > 1.0 + tol_)
      throw ContractViolation("FractionalColoring: entries must lie in [-1, 1]");
  }
  refresh();
}

void FractionalColoring::set(Index i, double value) {
  if (i < 0 || i >= x_.size()) throw ContractViolation("FractionalColoring::set: index out of range");
  if (!std::isfinite(value) || std::abs(value) > 1.0 + tol_)
    throw ContractViolation("FractionalColoring::set: value outside [-1, 1]");
  x_[i] = value;
  refresh();
}

void FractionalColoring::refresh() {
  fractional_.clear();
  for (Index i = 0; i < x_.size(); ++i) {
    if (std::abs(x_[i]) < 1.0 - tol_) {
      fractional_.push_back(i);
    } else {
      x_[i] = sign_of(x_[i]);
    }
  }
}

// ---------------------------------------------------------------------------
// Lifting

Eigen::VectorXd lift(const FractionalColoring& x, std::span<const Index> indices,
                     const Eigen::Ref<const Eigen::VectorXd>& z) {
  const auto& frac = x.fractional();
  if (indices.size() != frac.size() || !std::equal(indices.begin(), indices.end(), frac.begin()))
    throw ContractViolation("lift: indices of z must equal the fractional set of x");
  if (z.size() != static_cast<Index>(frac.size()))
    throw ContractViolation("lift: z has the wrong length");
  Eigen::VectorXd out = x.values();
  for (std::size_t j = 0; j < frac.size(); ++j) {
    const double zj = z[static_cast<Index>(j)];
    if (!(std::abs(zj) <= 1.0)) throw ContractViolation("lift: z must lie in [-1, 1]");
    out[frac[j]] = zj;
  }
  return out;
}

Eigen::VectorXd lift(const FractionalColoring& x, const Eigen::Ref<const Eigen::VectorXd>& z) {
  return lift(x, std::span<const Index>(x.fractional()), z);
}

// ---------------------------------------------------------------------------
// Reduction to linearly independent fractional support

FractionalColoring reduce_to_independent(
    const VectorSystem& sys, const std::function<void(const FractionalColoring&)>& observer) {
  FractionalColoring x(sys.lambda());
  if (observer) observer(x);

  while (!x.is_integral()) {
    const auto frac = x.fractional();
    const Index k = static_cast<Index>(frac.size());
    const Eigen::MatrixXd sub = select_columns(sys.vectors(), frac);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
    const bool independent = k <= sub.rows() && svd.singularValues()(k - 1) > kRankTol;
    if (independent) break;

    // Last right-singular vector spans (part of) the kernel.
    Eigen::VectorXd dir = svd.matrixV().col(k - 1);
    Index lead = 0;
    dir.cwiseAbs().maxCoeff(&lead);
    if (dir[lead] < 0.0) dir = -dir;

    auto exit_step = [&](double orientation, Index& hit) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < k; ++j) {
        const double d = orientation * dir[j];
        if (d == 0.0) continue;
        const double xj = x.values()[frac[static_cast<std::size_t>(j)]];
        const double mu = d > 0.0 ? (1.0 - xj) / d : (-1.0 - xj) / d;
        if (mu < best) {
          best = mu;
          hit = j;
        }
      }
      return best;
    };
    Index hit_pos = -1;
    Index hit_neg = -1;
    const double mu_pos = exit_step(1.0, hit_pos);
    const double mu_neg = exit_step(-1.0, hit_neg);
    const bool use_neg = mu_neg < mu_pos;
    const double orientation = use_neg ? -1.0 : 1.0;
    const double mu = use_neg ? mu_neg : mu_pos;
    const Index hit = use_neg ? hit_neg : hit_pos;
    if (!std::isfinite(mu) || hit < 0)
      throw NumericalError("reduce_to_independent: kernel direction is zero");

    Eigen::VectorXd next = x.values();
    for (Index j = 0; j < k; ++j) {
      const Index i = frac[static_cast<std::size_t>(j)];
      next[i] = std::clamp(next[i] + mu * orientation * dir[j], -1.0, 1.0);
    }
    const Index hit_index = frac[static_cast<std::size_t>(hit)];
    next[hit_index] = sign_of(orientation * dir[hit]);
    x = FractionalColoring(std::move(next), x.tolerance());
    if (observer) observer(x);
  }
  return x;
}

// ---------------------------------------------------------------------------
// FaceState

FaceState FaceState::at_coloring(const VectorSystem& sys, const FractionalColoring& x) {
  if (x.size() != sys.count()) throw ContractViolation("FaceState: coloring has the wrong length");
  FaceState face;
  face.coords_ = x.values();
  face.point_ = sys.residual(face.coords_);
  face.rebuild(sys);
  return face;
}

void FaceState::rebuild(const VectorSystem& sys) {
  active_.clear();
  for (Index i = 0; i < coords_.size(); ++i)
    if (std::abs(coords_[i]) < 1.0) active_.push_back(i);
  const Eigen::MatrixXd sub = select_columns(sys.vectors(), active_);
  const Index m = sys.dim();
  const Index k = sub.cols();
  duals_ = dual_basis(sub);
  if (k == 0) {
    basis_ = Eigen::MatrixXd(m, 0);
    return;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  basis_ = qr.householderQ() * Eigen::MatrixXd::Identity(m, k);
}

std::map<Index, int> FaceState::fixed_signs() const {
  std::map<Index, int> out;
  for (Index i = 0; i < coords_.size(); ++i)
    if (std::abs(coords_[i]) >= 1.0) out.emplace(i, coords_[i] > 0.0 ? 1 : -1);
  return out;
}

Eigen::VectorXd FaceState::dual_coordinates(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  return duals_.transpose() * p;
}

double FaceState::subspace_residual(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  return (p - basis_ * (basis_.transpose() * p)).norm();
}

// ---------------------------------------------------------------------------
// Boundary geometry

BoundaryPoint min_norm_boundary_point(const FaceState& face, const VectorSystem& sys) {
  if (face.is_vertex()) throw DegenerateFace("min_norm_boundary_point: face is a vertex");
  if (face.coordinates().size() != sys.count())
    throw ContractViolation("min_norm_boundary_point: face does not belong to this system");

  const auto& active = face.active();
  const Eigen::VectorXd& c = face.coordinates();
  BoundaryPoint best;
  double best_norm = std::numeric_limits<double>::infinity();
  double best_scale = 0.0;
  Index best_pos = -1;
  for (std::size_t p = 0; p < active.size(); ++p) {
    const double sq = face.duals().col(static_cast<Index>(p)).squaredNorm();
    for (int sign : {1, -1}) {
      // <v*, s> = sign - c_i with s collinear to v*.
      const double gap = sign - c[active[p]];
      const double norm = std::abs(gap) / std::sqrt(sq);
      if (norm < best_norm) {
        best_norm = norm;
        best_scale = gap / sq;
        best_pos = static_cast<Index>(p);
        best.index = active[p];
        best.sign = sign;
      }
    }
  }
  best.point = best_scale * face.duals().col(best_pos);

  const Eigen::VectorXd coords = face.dual_coordinates(best.point);
  for (std::size_t p = 0; p < active.size(); ++p) {
    const double value = c[active[p]] + coords[static_cast<Index>(p)];
    const bool on_facet = static_cast<Index>(p) == best_pos;
    if ((on_facet && std::abs(value - best.sign) > kFaceTol) ||
        (!on_facet && std::abs(value) > 1.0 + kFaceTol)) {
      std::ostringstream msg;
      msg << "min_norm_boundary_point: candidate fails boundary verification at index "
          << active[p] << " (dual coordinate " << value << ")";
      throw NumericalError(msg.str());
    }
  }
  return best;
}

RayExit ray_exit(const FaceState& face, const VectorSystem& sys,
                 const Eigen::Ref<const Eigen::VectorXd>& direction) {
  if (direction.size() != sys.dim()) throw ContractViolation("ray_exit: direction has the wrong length");
  const double norm = direction.norm();
  if (norm == 0.0) return {};
  if (face.subspace_residual(direction) > kFaceTol * std::max(1.0, norm))
    throw ContractViolation("ray_exit: direction does not lie in the face subspace");

  const auto& active = face.active();
  const Eigen::VectorXd d = face.dual_coordinates(direction);
  double mu = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < active.size(); ++p) {
    const double dp = d[static_cast<Index>(p)];
    const double ci = face.coordinates()[active[p]];
    if (dp > 0.0) mu = std::min(mu, (1.0 - ci) / dp);
    if (dp < 0.0) mu = std::min(mu, (-1.0 - ci) / dp);
  }
  if (mu > 1.0) return {1.0, false};
  return {mu, true};
}

FaceState descend_face(const FaceState& face, const VectorSystem& sys,
                       const Eigen::Ref<const Eigen::VectorXd>& step) {
  if (step.size() != sys.dim()) throw ContractViolation("descend_face: step has the wrong length");
  const double norm = step.norm();
  if (face.subspace_residual(step) > kFaceTol * std::max(1.0, norm))
    throw ContractViolation("descend_face: step does not lie in the face subspace");

  FaceState next = face;
  const Eigen::VectorXd d = face.dual_coordinates(step);
  const auto& active = face.active();
  for (std::size_t p = 0; p < active.size(); ++p) {
    const Index i = active[p];
    double value = face.coordinates()[i] + d[static_cast<Index>(p)];
    if (std::abs(value) > 1.0 + kFaceTol) {
      std::ostringstream msg;
      msg << "descend_face: step leaves the face (coordinate " << i << " = " << value << ")";
      throw ContractViolation(msg.str());
    }
    if (std::abs(value) >= 1.0 - kFaceTol) value = sign_of(value);
    next.coords_[i] = value;
  }
  next.point_ = face.point_ + step;
  next.rebuild(sys);
  return next;
}

}  // namespace vbal
