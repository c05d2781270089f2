#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "vbal/walk.hpp"

using namespace vbal;
using testing::vec;

TEST_SUITE("walk") {

TEST_CASE("paper-mode parameters") {
  // n = 4: gamma = 2 * 3 / 32, delta = 2 sqrt(6 ln 2) / 4, T = ceil(2 / gamma^2) * 3 = 57 * 3.
  WalkParams p = walk_params(4, WalkMode::paper);
  CHECK(p.gamma == 0.1875);
  CHECK(p.delta == doctest::Approx(1.019666990168809).epsilon(1e-12));
  CHECK(p.steps == 171);

  p = walk_params(1, WalkMode::paper);
  CHECK(p.gamma == 2.0);
  CHECK(p.delta == doctest::Approx(2.3548200450309493).epsilon(1e-12));
  CHECK(p.steps == 1);

  p = walk_params(16, WalkMode::paper);
  CHECK(p.gamma == 0.009765625);
  CHECK(p.steps == 104860);
}

TEST_CASE("practical-mode parameters keep gamma sqrt(n) < delta < 1") {
  for (Index n : {1, 2, 3, 8, 16, 100, 1000}) {
    const WalkParams p = walk_params(n, WalkMode::practical);
    CHECK(p.delta == 0.1);
    CHECK(p.gamma * std::sqrt(static_cast<double>(n)) < p.delta);
    CHECK(p.steps == static_cast<std::int64_t>(std::ceil(8 / (p.gamma * p.gamma))));
  }
  CHECK_THROWS_AS(walk_params(0, WalkMode::practical), PreconditionError);
}

TEST_CASE("mode names round-trip") {
  CHECK(parse_walk_mode(to_string(WalkMode::paper)) == WalkMode::paper);
  CHECK(parse_walk_mode("practical") == WalkMode::practical);
  CHECK_THROWS_AS(parse_walk_mode("fast"), PreconditionError);
}

TEST_CASE("one-dimensional walk is unbiased") {
  const VectorSystem sys(testing::cols({{1}}));
  WalkParams p = walk_params(1, WalkMode::practical);
  double sum = 0;
  const int runs = 2000;
  for (int r = 0; r < runs; ++r) {
    p.seed = static_cast<std::uint64_t>(r);
    const WalkTrace t = sample_coloring(sys, p);
    REQUIRE(std::abs(t.chi[0]) == 1.0);
    sum += t.chi[0];
  }
  CHECK(std::abs(sum / runs) <= 0.06);
}

TEST_CASE("all-ones certificate is frozen from the start") {
  const VectorSystem sys(testing::unit_columns(3, 4, 1), Eigen::VectorXd::Ones(4));
  const WalkTrace t = sample_coloring(sys, walk_params(4, WalkMode::practical));
  CHECK(t.chi == Eigen::VectorXd::Ones(4));
  CHECK(t.residual.norm() <= 1e-15);
  CHECK(t.steps_taken == 0);
  CHECK(t.sigma_recomputes == 0);
}

TEST_CASE("paper mode n = 8, seed 42 regression") {
  const VectorSystem sys(testing::unit_columns(8, 8, 42));
  WalkParams p = walk_params(8, WalkMode::paper);
  p.seed = 42;
  const WalkTrace t = sample_coloring(sys, p);
  CHECK(t.chi == vec({-1, 1, 1, -1, 1, 1, 1, -1}));
  CHECK(t.residual == sys.vectors() * t.chi - sys.shift());
  CHECK(t.restarts <= p.max_restarts);
  const WalkTrace again = sample_coloring(sys, p);
  CHECK(again.chi == t.chi);
  CHECK(again.steps_taken == t.steps_taken);
}

TEST_CASE("per-step invariants hold along the path") {
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 6;
    GaussianSource g(trial);
    Eigen::VectorXd lambda(n);
    for (Index i = 0; i < n; ++i) lambda[i] = 2 * g.uniform() - 1;
    const VectorSystem sys(testing::unit_columns(4, n, 50 + trial), lambda);
    WalkParams p = walk_params(n, WalkMode::practical);
    p.seed = static_cast<std::uint64_t>(trial);
    const double jump = p.gamma * std::pow(static_cast<double>(n), 1.5);
    std::int64_t seen = 0;
    const WalkTrace t = sample_coloring(sys, p, [&](const WalkStep& s) {
      ++seen;
      std::vector<bool> moving(static_cast<std::size_t>(n), false);
      for (Index i : s.active) moving[static_cast<std::size_t>(i)] = true;
      for (Index i = 0; i < n; ++i) {
        CHECK(std::abs(s.after[i]) <= 1 + 1e-9);
        CHECK(std::abs(s.after[i] - s.before[i]) <= p.gamma * std::sqrt(static_cast<double>(n)) + 1e-12);
        if (!moving[static_cast<std::size_t>(i)]) CHECK(s.after[i] == s.before[i]);
        else CHECK(std::abs(s.before[i]) < 1 - p.delta);
      }
      CHECK((sys.vectors() * (s.after - s.before)).norm() <= jump + 1e-12);
    });
    CHECK(seen == t.steps_taken);
    CHECK((t.chi.cwiseAbs().array() == 1.0).all());
  }
}

TEST_CASE("single-step variance equals gamma squared on active coordinates") {
  const Index n = 8;
  const VectorSystem sys(testing::unit_columns(4, n, 99));
  WalkParams p = walk_params(n, WalkMode::practical);
  p.steps = 1;
  p.max_restarts = 0;
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(n), sum_sq = Eigen::ArrayXd::Zero(n);
  const int runs = 10000;
  for (int r = 0; r < runs; ++r) {
    p.seed = static_cast<std::uint64_t>(r);
    Eigen::ArrayXd d;
    auto grab = [&](const WalkStep& s) { d = (s.after - s.before).array().square(); };
    CHECK_THROWS_AS(sample_coloring(sys, p, grab), BudgetExhausted);
    sum += d;
    sum_sq += d.square();
  }
  const double g2 = p.gamma * p.gamma;
  for (Index i = 0; i < n; ++i) {
    const double mean = sum[i] / runs;
    const double se = std::sqrt(std::max(sum_sq[i] / runs - mean * mean, 0.0) / runs);
    CHECK(std::abs(mean - g2) <= std::max(3 * se, 1e-12));
  }
}

TEST_CASE("sample_coloring preconditions and budget") {
  const VectorSystem long_vectors(2 * Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(sample_coloring(long_vectors, walk_params(2, WalkMode::practical)), PreconditionError);

  const VectorSystem sys(Eigen::MatrixXd::Identity(2, 2));
  WalkParams bad = walk_params(2, WalkMode::practical);
  bad.gamma = 0.2;
  CHECK_THROWS_AS(sample_coloring(sys, bad), PreconditionError);

  WalkParams tiny = walk_params(2, WalkMode::practical);
  tiny.steps = 3;
  tiny.max_restarts = 2;
  CHECK_THROWS_AS(sample_coloring(sys, tiny), BudgetExhausted);
}

}  // TEST_SUITE
