#include "vbal/convex.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vbal/rng.hpp"

namespace vbal {

struct ConvexBody::Node {
  Kind kind;
  Index dim;
  Eigen::VectorXd vec;   // normal, center, shift or slice offset
  double scalar = 0.0;   // offset, radius, cube scale or scale factor
  Eigen::MatrixXd basis;
  std::vector<ConvexBody> children;
  Predicate predicate;
};

namespace {

void require_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
    throw ContractViolation(msg.str());
  }
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

ConvexBody ConvexBody::space(Index dim) {
  if (dim < 0) throw PreconditionError("space: negative dimension");
  return ConvexBody(std::make_shared<const Node>(Node{Kind::space, dim, {}, 0.0, {}, {}, {}}));
}

ConvexBody ConvexBody::halfspace(Eigen::VectorXd normal, double offset) {
  if (!finite(normal) || !std::isfinite(offset)) throw PreconditionError("halfspace: non-finite data");
  const Index d = normal.size();
  return ConvexBody(std::make_shared<const Node>(Node{Kind::halfspace, d, std::move(normal), offset, {}, {}, {}}));
}

ConvexBody ConvexBody::ball(Eigen::VectorXd center, double radius) {
  if (!finite(center) || !(radius >= 0.0)) throw PreconditionError("ball: invalid center or radius");
  const Index d = center.size();
  return ConvexBody(std::make_shared<const Node>(Node{Kind::ball, d, std::move(center), radius, {}, {}, {}}));
}

ConvexBody ConvexBody::cube(Index dim, double scale, Eigen::VectorXd shift) {
  if (dim < 0 || !(scale >= 0.0)) throw PreconditionError("cube: invalid dimension or scale");
  if (shift.size() == 0) shift = Eigen::VectorXd::Zero(dim);
  require_dim(dim, shift.size(), "cube");
  if (!finite(shift)) throw PreconditionError("cube: non-finite shift");
  return ConvexBody(std::make_shared<const Node>(Node{Kind::cube, dim, std::move(shift), scale, {}, {}, {}}));
}

ConvexBody ConvexBody::intersection(std::vector<ConvexBody> parts) {
  if (parts.empty()) throw PreconditionError("intersection: no parts");
  const Index d = parts.front().dim();
  for (const auto& p : parts) require_dim(d, p.dim(), "intersection");
  return ConvexBody(std::make_shared<const Node>(Node{Kind::intersection, d, {}, 0.0, {}, std::move(parts), {}}));
}

ConvexBody ConvexBody::custom(Index dim, Predicate membership) {
  if (!membership) throw PreconditionError("custom: empty predicate");
  return ConvexBody(std::make_shared<const Node>(Node{Kind::custom, dim, {}, 0.0, {}, {}, std::move(membership)}));
}

Index ConvexBody::dim() const { return node_->dim; }
ConvexBody::Kind ConvexBody::kind() const { return node_->kind; }
const Eigen::VectorXd& ConvexBody::vector_param() const { return node_->vec; }
double ConvexBody::scalar_param() const { return node_->scalar; }
const Eigen::MatrixXd& ConvexBody::slice_basis() const { return node_->basis; }
const std::vector<ConvexBody>& ConvexBody::children() const { return node_->children; }

bool ConvexBody::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Node& n = *node_;
  require_dim(n.dim, x.size(), "contains");
  switch (n.kind) {
    case Kind::space:
      return true;
    case Kind::halfspace:
      return n.vec.dot(x) <= n.scalar;
    case Kind::ball:
      return (x - n.vec).squaredNorm() <= n.scalar * n.scalar;
    case Kind::cube:
      return n.dim == 0 || (x - n.vec).cwiseAbs().maxCoeff() <= n.scalar;
    case Kind::intersection:
      for (const auto& c : n.children)
        if (!c.contains(x)) return false;
      return true;
    case Kind::shifted:
      return n.children.front().contains(x - n.vec);
    case Kind::scaled:
      return n.children.front().contains(x / n.scalar);
    case Kind::symmetrized: {
      const auto& k = n.children.front();
      return k.contains(x) && k.contains(-x);
    }
    case Kind::slice:
      return n.children.front().contains(n.vec + n.basis * x);
    case Kind::custom:
      return n.predicate(x);
  }
  return false;
}

ConvexBody shifted(const ConvexBody& body, Eigen::VectorXd p) {
  require_dim(body.dim(), p.size(), "shifted");
  if (!p.allFinite()) throw PreconditionError("shifted: non-finite shift");
  using Node = ConvexBody::Node;
  return ConvexBody(std::make_shared<const Node>(
      Node{ConvexBody::Kind::shifted, body.dim(), std::move(p), 0.0, {}, {body}, {}}));
}

ConvexBody scaled(const ConvexBody& body, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("scaled: factor must be positive");
  using Node = ConvexBody::Node;
  return ConvexBody(std::make_shared<const Node>(
      Node{ConvexBody::Kind::scaled, body.dim(), {}, c, {}, {body}, {}}));
}

ConvexBody symmetrize(const ConvexBody& body) {
  using Node = ConvexBody::Node;
  return ConvexBody(std::make_shared<const Node>(
      Node{ConvexBody::Kind::symmetrized, body.dim(), {}, 0.0, {}, {body}, {}}));
}

ConvexBody restrict(const ConvexBody& body, Eigen::MatrixXd basis, Eigen::VectorXd p) {
  require_dim(body.dim(), basis.rows(), "restrict");
  require_dim(body.dim(), p.size(), "restrict");
  const Index k = basis.cols();
  if (k > 0) {
    const double err = (basis.transpose() * basis - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw PreconditionError("restrict: basis is not orthonormal");
  }
  using Node = ConvexBody::Node;
  return ConvexBody(std::make_shared<const Node>(
      Node{ConvexBody::Kind::slice, k, std::move(p), 0.0, std::move(basis), {body}, {}}));
}

MeasureEstimate gaussian_measure(const ConvexBody& body, std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw PreconditionError("gaussian_measure: need at least 100 samples");
  GaussianSource g(seed);
  Eigen::VectorXd x(body.dim());
  std::int64_t inside = 0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    g.fill(x);
    if (body.contains(x)) ++inside;
  }
  MeasureEstimate est;
  est.samples = n_samples;
  est.p_hat = static_cast<double>(inside) / static_cast<double>(n_samples);
  est.ci_halfwidth = 1.96 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_samples));
  est.seed = seed;
  return est;
}

double combined_ci(const MeasureEstimate& a, const MeasureEstimate& b) {
  return std::hypot(a.ci_halfwidth, b.ci_halfwidth);
}

std::int64_t barycenter_sample_count(Index dim, double delta, double epsilon, double paouris_beta) {
  if (!(delta > 0.0)) throw PreconditionError("barycenter: delta must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("barycenter: epsilon must lie in (0, 1)");
  if (!(paouris_beta > 0.0)) throw PreconditionError("barycenter: beta must be positive");
  const double l = std::log(std::exp(1.0) / epsilon);
  const double n = std::ceil((paouris_beta / delta) * (paouris_beta / delta) * l * l * static_cast<double>(dim));
  if (!(n < 9e15)) throw PreconditionError("barycenter: sample count overflows");
  return static_cast<std::int64_t>(n);
}

std::int64_t barycenter_attempts(std::int64_t samples, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("barycenter: epsilon must lie in (0, 1)");
  const double n = static_cast<double>(std::max<std::int64_t>(samples, 1));
  return static_cast<std::int64_t>(std::ceil(std::log2(2.0 * n / epsilon)));
}

BarycenterEstimate barycenter(const ConvexBody& body, double delta, double epsilon, std::uint64_t seed,
                              double paouris_beta) {
  const Index d = body.dim();
  BarycenterEstimate est;
  est.delta = delta;
  est.epsilon = epsilon;
  est.samples_used = barycenter_sample_count(d, delta, epsilon, paouris_beta);
  est.attempts_per_sample = barycenter_attempts(est.samples_used, epsilon);
  est.b_hat = Eigen::VectorXd::Zero(d);
  if (est.samples_used == 0) return est;

  GaussianSource g(seed);
  Eigen::VectorXd x(d);
  for (std::int64_t s = 0; s < est.samples_used; ++s) {
    bool found = false;
    for (std::int64_t a = 0; a < est.attempts_per_sample; ++a) {
      g.fill(x);
      if (body.contains(x)) {
        found = true;
        break;
      }
      ++est.rejection_failures;
    }
    if (!found) {
      std::ostringstream msg;
      msg << "barycenter: point " << s << " missed the body in all " << est.attempts_per_sample
          << " attempts (Gaussian measure likely below 1/2)";
      throw RejectionExhausted(msg.str());
    }
    est.b_hat += x;
  }
  est.b_hat /= static_cast<double>(est.samples_used);
  return est;
}

GaugeValue gauge_norm(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x, double tol) {
  const Index d = body.dim();
  require_dim(d, x.size(), "gauge_norm");
  if (!(tol > 0.0)) throw PreconditionError("gauge_norm: tolerance must be positive");
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(d);
  // Interior probes use tol as an absolute radius; the bisection stops at relative width tol.
  if (!body.contains(probe)) throw PreconditionError("gauge_norm: origin is not in the body");
  for (Index i = 0; i < d; ++i) {
    for (double s : {tol, -tol}) {
      probe[i] = s;
      if (!body.contains(probe)) throw PreconditionError("gauge_norm: origin is not interior");
    }
    probe[i] = 0.0;
  }
  if (x.isZero(0.0)) return {};

  // x in sK  <=>  x / s in K.  Bracket s_out < gauge <= s_in, then bisect.
  const double cap = std::ldexp(1.0, 64);
  auto inside = [&](double s) { return body.contains(x / s); };
  double s_in = 1.0;
  double s_out = 0.0;
  if (inside(1.0)) {
    double s = 1.0;
    while (inside(s)) {
      s_in = s;
      s *= 0.5;
      if (s < 1.0 / cap) return {0.0, true};
    }
    s_out = s;
  } else {
    double s = 1.0;
    while (!inside(s)) {
      s_out = s;
      s *= 2.0;
      if (s > cap) throw NumericalError("gauge_norm: ray never enters the body");
    }
    s_in = s;
  }
  while (s_in - s_out > tol * s_in) {
    const double mid = 0.5 * (s_in + s_out);
    (inside(mid) ? s_in : s_out) = mid;
  }
  return {0.5 * (s_in + s_out), false};
}

std::int64_t convexity_violations(const ConvexBody& body, std::int64_t pairs, std::uint64_t seed) {
  GaussianSource g(seed);
  const Index d = body.dim();
  Eigen::VectorXd a(d), b(d);
  std::int64_t found = 0, bad = 0;
  const std::int64_t budget = 100 * std::max<std::int64_t>(pairs, 1);
  for (std::int64_t draws = 0; found < pairs && draws < budget; ++draws) {
    g.fill(a);
    g.fill(b);
    if (!body.contains(a) || !body.contains(b)) continue;
    ++found;
    if (!body.contains(0.5 * (a + b))) ++bad;
  }
  return bad;
}

std::int64_t symmetry_violations(const ConvexBody& body, std::int64_t probes, std::uint64_t seed) {
  GaussianSource g(seed);
  Eigen::VectorXd x(body.dim());
  std::int64_t bad = 0;
  for (std::int64_t s = 0; s < probes; ++s) {
    g.fill(x);
    if (body.contains(x) != body.contains(-x)) ++bad;
  }
  return bad;
}

}  // namespace vbal
