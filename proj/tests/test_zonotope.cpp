#include <cmath>

#include <Eigen/Dense>
#include <doctest.h>

#include "helpers.hpp"
#include "vbal/zonotope.hpp"

using namespace vbal;
using testing::cols;
using testing::vec;

TEST_SUITE("zonotope") {

TEST_CASE("lift substitutes the fractional coordinates") {
  const FractionalColoring x(vec({1, 0.5, -1}));
  CHECK(x.fractional() == std::vector<Index>{1});
  CHECK(lift(x, vec({0.25})).isApprox(vec({1, 0.25, -1})));

  const FractionalColoring integral(vec({1, -1}));
  CHECK(lift(integral, Eigen::VectorXd(0)) == vec({1, -1}));

  const FractionalColoring all(vec({0, 0}));
  CHECK(lift(all, vec({1, -1})) == vec({1, -1}));
}

TEST_CASE("lift rejects mismatched index sets") {
  const FractionalColoring x(vec({1, 0.5, 0.0}));
  const std::vector<Index> wrong{0, 1};
  CHECK_THROWS_AS(lift(x, wrong, vec({0.0, 0.0})), ContractViolation);
  CHECK_THROWS_AS(lift(x, vec({0.0})), ContractViolation);
}

TEST_CASE("fractional set snaps near-integral entries") {
  FractionalColoring x(vec({1 - 1e-12, -0.3, -1 + 5e-10}));
  CHECK(x.fractional() == std::vector<Index>{1});
  CHECK(x.values()[0] == 1.0);
  CHECK(x.values()[2] == -1.0);
  x.set(1, 1.0);
  CHECK(x.is_integral());
  CHECK_THROWS_AS(x.set(0, 1.5), ContractViolation);
}

TEST_CASE("lifting identity on random data") {
  GaussianSource g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 3, n = 6;
    const Eigen::MatrixXd v = testing::unit_columns(m, n, 100 + trial);
    Eigen::VectorXd lambda(n), raw(n);
    for (Index i = 0; i < n; ++i) {
      lambda[i] = 2 * g.uniform() - 1;
      raw[i] = g.uniform() < 0.4 ? (g.uniform() < 0.5 ? -1.0 : 1.0) : 2 * g.uniform() - 1;
    }
    const VectorSystem sys(v, lambda);
    const FractionalColoring x(raw);
    Eigen::VectorXd z(static_cast<Index>(x.fractional().size()));
    for (Index j = 0; j < z.size(); ++j) z[j] = 2 * g.uniform() - 1;
    const Eigen::VectorXd lhs = sys.residual(lift(x, z));
    Eigen::VectorXd rhs = sys.residual(x.values());
    for (std::size_t j = 0; j < x.fractional().size(); ++j) {
      const Index i = x.fractional()[j];
      rhs += (z[static_cast<Index>(j)] - x.values()[i]) * v.col(i);
    }
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("reduce_to_independent: duplicate columns exit at (1, 0)") {
  // Kernel (1, -1): both orientations exit after 0.5, the tie goes to the positive one.
  const VectorSystem sys(cols({{1, 0}, {1, 0}}), vec({0.5, 0.5}));
  const FractionalColoring x = reduce_to_independent(sys);
  CHECK(x.values()[0] == 1.0);
  CHECK(x.values()[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((sys.vectors() * x.values() - sys.shift()).norm() <= 1e-12);
}

TEST_CASE("reduce_to_independent: already independent columns are untouched") {
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2), vec({0.3, -0.7}));
  const FractionalColoring x = reduce_to_independent(sys);
  CHECK(x.values() == vec({0.3, -0.7}));
}

TEST_CASE("reduce_to_independent: parallel columns e1, 2 e1 from zero") {
  const VectorSystem sys(cols({{1, 0}, {2, 0}}));
  const FractionalColoring x = reduce_to_independent(sys);
  CHECK(x.values()[0] == 1.0);
  CHECK(x.values()[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(x.fractional() == std::vector<Index>{1});
}

TEST_CASE("reduce_to_independent properties on random dependent systems") {
  GaussianSource g(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = 1 + trial % 4;
    const Index n = m + 1 + trial % 5;
    Eigen::MatrixXd v = testing::unit_columns(m, n, 900 + trial);
    if (trial % 3 == 0) v.col(n - 1) = v.col(0);  // exact duplicates too
    Eigen::VectorXd lambda(n);
    for (Index i = 0; i < n; ++i) lambda[i] = 2 * g.uniform() - 1;
    const VectorSystem sys(v, lambda);
    const double tol = 1e-8 * sys.shift().norm() + 1e-10;
    std::size_t last = static_cast<std::size_t>(n) + 1;
    const FractionalColoring x = reduce_to_independent(sys, [&](const FractionalColoring& step) {
      CHECK(step.fractional().size() <= last);
      last = step.fractional().size();
      CHECK((sys.vectors() * step.values() - sys.shift()).norm() <= tol);
      CHECK(step.values().cwiseAbs().maxCoeff() <= 1.0);
    });
    const auto& frac = x.fractional();
    if (!frac.empty()) {
      Eigen::MatrixXd sub(m, static_cast<Index>(frac.size()));
      for (std::size_t j = 0; j < frac.size(); ++j) sub.col(static_cast<Index>(j)) = v.col(frac[j]);
      REQUIRE(sub.cols() <= m);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
      CHECK(svd.singularValues().minCoeff() > 1e-10);
    }
  }
}

TEST_CASE("dual_basis examples") {
  CHECK(dual_basis(Eigen::MatrixXd::Identity(2, 2)).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(testing::max_abs_diff(dual_basis(cols({{2, 0}, {0, 1}})), cols({{0.5, 0}, {0, 1}})) <= 1e-12);
  CHECK(testing::max_abs_diff(dual_basis(cols({{1, 0}, {1, 1}})), cols({{1, -1}, {0, 1}})) <= 1e-12);
}

TEST_CASE("dual_basis is biorthogonal, in the span, and an involution") {
  for (int trial = 0; trial < 30; ++trial) {
    const Index m = 6, k = 1 + trial % 6;
    const Eigen::MatrixXd v = testing::unit_columns(m, k, 300 + trial);
    const Eigen::MatrixXd d = dual_basis(v);
    CHECK(testing::max_abs_diff(d.transpose() * v, Eigen::MatrixXd::Identity(k, k)) <= 1e-8);
    const Eigen::MatrixXd proj = v * (v.transpose() * v).inverse() * v.transpose();
    CHECK(testing::max_abs_diff(proj * d, d) <= 1e-8);
    if (k == m) CHECK(testing::max_abs_diff(dual_basis(d), v) <= 1e-7);
  }
}

TEST_CASE("dual_basis works in long double") {
  Eigen::Matrix<long double, 2, 2> v;
  v << 1, 1, 0, 1;
  const auto d = dual_basis(v);
  CHECK(std::abs(static_cast<double>(d(0, 0) - 1)) < 1e-15);
  CHECK(std::abs(static_cast<double>(d(1, 0) + 1)) < 1e-15);
}

TEST_CASE("dual_basis rejects dependent columns") {
  CHECK_THROWS_AS(dual_basis(cols({{1, 0}, {2, 0}})), SingularSystem);
  CHECK_THROWS_AS(dual_basis(cols({{1, 0}, {0, 1}, {1, 1}})), SingularSystem);
}

namespace {

FaceState face_of(const VectorSystem& sys) {
  return FaceState::at_coloring(sys, FractionalColoring(sys.lambda()));
}

}  // namespace

TEST_CASE("face basis is orthonormal and spans the active vectors") {
  const VectorSystem sys(testing::unit_columns(5, 3, 77), vec({0.2, -0.4, 0.9}));
  const FaceState f = face_of(sys);
  CHECK(f.dim() == 3);
  CHECK(testing::max_abs_diff(f.basis().transpose() * f.basis(), Eigen::MatrixXd::Identity(3, 3)) <= 1e-10);
  for (Index i = 0; i < 3; ++i) CHECK(f.subspace_residual(sys.vectors().col(i)) <= 1e-8);
  CHECK(f.point().norm() <= 1e-12);
}

TEST_CASE("min_norm_boundary_point: symmetric square") {
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2));
  const BoundaryPoint b = min_norm_boundary_point(face_of(sys), sys);
  CHECK(b.point.norm() == doctest::Approx(1.0));
  CHECK(b.point.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("min_norm_boundary_point: shifted square") {
  // P = [-1,1]^2 - (0.5, 0) = [-1.5, 0.5] x [-1, 1]; the right edge is closest.
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2), vec({0.5, 0}));
  const BoundaryPoint b = min_norm_boundary_point(face_of(sys), sys);
  CHECK((b.point - vec({0.5, 0})).norm() <= 1e-12);
  CHECK(b.index == 0);
  CHECK(b.sign == 1);
}

TEST_CASE("min_norm_boundary_point: skewed parallelepiped") {
  const VectorSystem sys(cols({{1, 0}, {1, 1}}));
  const BoundaryPoint b = min_norm_boundary_point(face_of(sys), sys);
  CHECK(b.point.norm() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK((b.point - vec({0.5, -0.5})).norm() <= 1e-12);
  CHECK(b.index == 0);
}

TEST_CASE("min_norm_boundary_point on a vertex is degenerate") {
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2), vec({1, -1}));
  CHECK_THROWS_AS(min_norm_boundary_point(face_of(sys), sys), DegenerateFace);
}

TEST_CASE("ray_exit examples") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  const FaceState f = face_of(square);
  RayExit e = ray_exit(f, square, vec({2, 0}));
  CHECK(e.hit);
  CHECK(e.lambda == doctest::Approx(0.5));
  e = ray_exit(f, square, vec({0.2, 0.2}));
  CHECK_FALSE(e.hit);
  CHECK(e.lambda == 1.0);
  e = ray_exit(f, square, vec({0, 0}));
  CHECK_FALSE(e.hit);

  const VectorSystem shifted_sq(Eigen::MatrixXd::Identity(2, 2), vec({0.5, 0}));
  e = ray_exit(face_of(shifted_sq), shifted_sq, vec({1, 0}));
  CHECK(e.hit);
  CHECK(e.lambda == doctest::Approx(0.5));
}

TEST_CASE("ray_exit needs a direction in W") {
  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2), vec({1, 0}));
  CHECK_THROWS_AS(ray_exit(face_of(sys), sys, vec({1, 1})), ContractViolation);
}

TEST_CASE("descend_face examples") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  const FaceState f = face_of(square);
  const FaceState g = descend_face(f, square, vec({1, 0}));
  CHECK(g.fixed_signs() == std::map<Index, int>{{0, 1}});
  CHECK(g.active() == std::vector<Index>{1});
  CHECK(std::abs(std::abs(g.basis()(1, 0)) - 1.0) <= 1e-12);
  CHECK(g.point() == vec({1, 0}));

  const FaceState same = descend_face(f, square, vec({0, 0}));
  CHECK(same.dim() == 2);
  CHECK(same.point() == f.point());

  const VectorSystem skew(cols({{1, 0}, {1, 1}}));
  const FaceState s = face_of(skew);
  const FaceState t = descend_face(s, skew, vec({0.5, -0.5}));
  CHECK(t.dim() == 1);
  CHECK(t.fixed_signs() == std::map<Index, int>{{0, 1}});
  CHECK((skew.residual(t.coordinates()) - t.point()).norm() <= 1e-12);
}

TEST_CASE("descend_face rejects steps leaving the face") {
  const VectorSystem square(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(descend_face(face_of(square), square, vec({1.5, 0})), ContractViolation);
}

TEST_CASE("repeated min-norm descents reach a vertex in at most n steps") {
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 6;
    GaussianSource g(4000 + trial);
    Eigen::VectorXd lambda(n);
    for (Index i = 0; i < n; ++i) lambda[i] = 1.8 * g.uniform() - 0.9;
    const VectorSystem sys(testing::unit_columns(n, n, 5000 + trial), lambda);
    FaceState f = face_of(sys);
    int steps = 0;
    while (!f.is_vertex()) {
      const Index before = f.dim();
      f = descend_face(f, sys, min_norm_boundary_point(f, sys).point);
      CHECK(f.dim() < before);
      ++steps;
    }
    CHECK(steps <= n);
    CHECK((sys.residual(f.coordinates()) - f.point()).norm() <= 1e-8);
  }
}

}  // TEST_SUITE
