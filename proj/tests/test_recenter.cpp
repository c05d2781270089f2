#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "vbal/normal.hpp"
#include "vbal/recenter.hpp"

using namespace vbal;
using testing::vec;

namespace {

FaceState start_face(const VectorSystem& sys) {
  return FaceState::at_coloring(sys, reduce_to_independent(sys));
}

RecenterOptions options(double delta, double epsilon) {
  RecenterOptions o;
  o.delta = delta;
  o.epsilon = epsilon;
  o.paouris_beta = 1.0;
  return o;
}

bool in_parallelepiped(const FaceState& f, const VectorSystem& sys) {
  return f.coordinates().cwiseAbs().maxCoeff() <= 1.0 &&
         (sys.residual(f.coordinates()) - f.point()).norm() <= 1e-8;
}

}  // namespace

TEST_SUITE("recenter") {

TEST_CASE("symmetric ball: the first estimate is already small") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  const RecenterResult r =
      recenter(ConvexBody::ball(vec({0, 0}), 3.0), square, start_face(square), options(0.05, 0.05), 1);
  CHECK(r.ok());
  CHECK(r.iterations == 1);
  CHECK(r.face.dim() == 2);
  CHECK(r.q.norm() == 0.0);
  CHECK(r.barycenter_norm <= 0.025);
}

TEST_CASE("halfspace: q moves against the barycenter until a facet stops it") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  const ConvexBody k = ConvexBody::halfspace(vec({1, 0}), normal_quantile(0.75));
  const double delta = 0.05;
  const RecenterResult r = recenter(k, square, start_face(square), options(delta, 0.05), 2);
  REQUIRE(r.ok());
  // The restricted barycenter has a negative first coordinate, so q_1 decreases; the
  // facet x_1 = -1 is reached before the barycenter becomes small.
  CHECK(r.q[0] < 0);
  CHECK(r.q[0] == -1.0);
  CHECK(r.face.dim() == 1);
  CHECK(r.descents == 1);
  CHECK(r.iterations >= 2);
  CHECK(r.measure_after.p_hat >= r.measure_before.p_hat - 3 * combined_ci(r.measure_before, r.measure_after));
  const ConvexBody local = restrict(k, r.face.basis(), r.q);
  CHECK(barycenter(local, delta / 6, 0.05, 99, 1.0).b_hat.norm() <= delta);
}

TEST_CASE("whole space on a shifted square returns immediately") {
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2), vec({0.9, 0}));
  const RecenterResult r = recenter(ConvexBody::space(2), sys, start_face(sys), options(0.05, 0.05), 3);
  CHECK(r.ok());
  CHECK(r.iterations == 1);
  CHECK(r.q.norm() == 0.0);
}

TEST_CASE("origin outside K fails without iterating") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  const RecenterResult r =
      recenter(ConvexBody::halfspace(vec({1, 0}), -0.5), square, start_face(square), options(0.1, 0.1), 4);
  CHECK_FALSE(r.ok());
  CHECK(r.iterations == 0);
}

TEST_CASE("an estimate outside a non-convex oracle fails") {
  // Two far slabs plus a speck at the origin: the mean of the slabs falls in the gap.
  const ConvexBody k = ConvexBody::custom(2, [](const Eigen::Ref<const Eigen::VectorXd>& x) {
    return x[0] >= 0.3 || x[0] <= -1.0 || x.norm() <= 0.01;
  });
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  const RecenterResult r = recenter(k, square, start_face(square), options(0.1, 0.1), 5);
  CHECK_FALSE(r.ok());
  CHECK(r.iterations == 1);
}

TEST_CASE("vertex faces are already recentered") {
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2), vec({1, -1}));
  const RecenterResult r = recenter(ConvexBody::ball(vec({0, 0}), 1.0), sys, 0.1, 0.1, 6);
  CHECK(r.ok());
  CHECK(r.face.is_vertex());
}

TEST_CASE("moves stay in P and dimensions never grow") {
  for (int trial = 0; trial < 5; ++trial) {
    GaussianSource g(300 + trial);
    const Index n = 3;
    Eigen::VectorXd lambda(n);
    for (Index i = 0; i < n; ++i) lambda[i] = 1.6 * g.uniform() - 0.8;
    const VectorSystem sys(0.5 * testing::unit_columns(n, n, 40 + trial), lambda);
    const ConvexBody k = ConvexBody::intersection(
        {ConvexBody::halfspace(g.direction(n), 0.4), ConvexBody::cube(n, 2.5)});
    FaceState face = start_face(sys);
    const RecenterOptions opts = options(0.2, 0.1);
    const RecenterResult r = recenter(k, sys, face, opts, 7 + trial);
    CHECK(r.ok());
    CHECK(in_parallelepiped(r.face, sys));
    CHECK(r.face.dim() <= face.dim());
    CHECK(r.descents <= n);
    CHECK(r.iterations <= static_cast<std::int64_t>(std::ceil(24 / 0.04)) + n);
    CHECK(k.contains(r.q));
  }
}

TEST_CASE("recenter preconditions") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(recenter(ConvexBody::space(2), square, 0.0, 0.1, 1), PreconditionError);
  CHECK_THROWS_AS(recenter(ConvexBody::space(2), square, 0.1, 1.0, 1), PreconditionError);
  CHECK_THROWS_AS(recenter(ConvexBody::space(3), square, 0.1, 0.1, 1), ContractViolation);
}

}  // TEST_SUITE
