#include <cmath>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "vbal/bench.hpp"
#include "vbal/io.hpp"

using namespace vbal;
using testing::vec;

TEST_SUITE("io") {

TEST_CASE("instance JSON round-trips bit-exactly") {
  GaussianSource g(1);
  Eigen::VectorXd lambda(5);
  for (Index i = 0; i < 5; ++i) lambda[i] = 2 * g.uniform() - 1;
  const VectorSystem sys(0.7 * testing::unit_columns(3, 5, 2), lambda, 0.7);
  const VectorSystem back = system_from_json(Json::parse(system_to_json(sys).dump()));
  CHECK(back.vectors() == sys.vectors());
  CHECK(back.lambda() == sys.lambda());
  CHECK(back.norm_bound() == sys.norm_bound());
  CHECK(instance_hash(back) == instance_hash(sys));
  CHECK(system_to_json(back) == system_to_json(sys));
}

TEST_CASE("instance JSON errors") {
  CHECK_THROWS_AS(system_from_json(Json::parse(R"({"m": 2})")), PreconditionError);
  CHECK_THROWS_AS(system_from_json(Json::parse(R"({"m": 2, "n": 1, "vectors": [[1]]})")), PreconditionError);
  CHECK_THROWS_AS(system_from_json(Json::parse(R"({"m": 1, "n": 1, "vectors": [[1]], "lambda": [2]})")),
                  PreconditionError);
  CHECK_THROWS_AS(system_from_json(Json::parse(R"({"m": 1, "n": 1, "vectors": [[2]], "norm_bound": 1})")),
                  PreconditionError);
}

TEST_CASE("instance hash tells instances apart") {
  const VectorSystem a(Eigen::MatrixXd::Identity(2, 2));
  const VectorSystem b(Eigen::MatrixXd::Identity(2, 2), vec({0.5, 0}));
  CHECK(instance_hash(a) != instance_hash(b));
  CHECK(instance_hash(a).size() == 16);
}

TEST_CASE("body JSON round-trips structurally") {
  const ConvexBody k = symmetrize(ConvexBody::intersection({
      shifted(ConvexBody::cube(3, 1.25, vec({0.1, 0, -0.2})), vec({0.3, 0.3, 0})),
      scaled(ConvexBody::halfspace(vec({1, -2, 0.5}), 0.75), 1.5),
      ConvexBody::ball(vec({0, 0, 0.1}), 2.0),
      ConvexBody::space(3),
  }));
  const Json j = body_to_json(k);
  const ConvexBody back = body_from_json(Json::parse(j.dump()));
  CHECK(body_to_json(back) == j);
  GaussianSource g(3);
  for (int i = 0; i < 500; ++i) {
    const Eigen::VectorXd x = g.vector(3);
    CHECK(back.contains(x) == k.contains(x));
  }
}

TEST_CASE("body JSON documented forms") {
  const ConvexBody cube = body_from_json(Json::parse(R"({"type": "cube", "dim": 2, "scale": 0.5})"));
  CHECK(cube.contains(vec({0.5, -0.5})));
  CHECK_FALSE(cube.contains(vec({0.51, 0})));
  const ConvexBody half = body_from_json(Json::parse(R"({"type": "halfspace", "normal": [1, 1], "offset": 1})"));
  CHECK(half.contains(vec({0.5, 0.5})));
  CHECK_FALSE(half.contains(vec({0.6, 0.5})));
  const ConvexBody moved = body_from_json(
      Json::parse(R"({"type": "shifted", "shift": [2], "children": [{"type": "cube", "dim": 1, "scale": 1}]})"));
  CHECK(moved.contains(vec({2.9})));
}

TEST_CASE("body JSON errors") {
  CHECK_THROWS_AS(body_from_json(Json::parse(R"({"type": "torus"})")), PreconditionError);
  CHECK_THROWS_AS(body_from_json(Json::parse(R"({"type": "ball", "center": [0]})")), PreconditionError);
  CHECK_THROWS_AS(body_from_json(Json::parse(R"({"type": "scaled", "factor": 2, "children": []})")),
                  PreconditionError);
  CHECK_THROWS_AS(body_to_json(restrict(ConvexBody::space(2), Eigen::MatrixXd::Identity(2, 1), vec({0, 0}))),
                  PreconditionError);
}

TEST_CASE("sample CSV round-trips bit-exactly") {
  GaussianSource g(4);
  Eigen::MatrixXd s(50, 3);
  for (Index r = 0; r < 50; ++r)
    for (Index c = 0; c < 3; ++c) s(r, c) = g() * std::pow(10.0, static_cast<double>(c * 7 - 7));
  std::stringstream buf;
  write_samples_csv(buf, s);
  CHECK(read_samples_csv(buf) == s);

  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_samples_csv(ragged), PreconditionError);
  std::stringstream junk("1,x\n");
  CHECK_THROWS_AS(read_samples_csv(junk), PreconditionError);
}

TEST_CASE("coloring outputs") {
  const VectorSystem sys(testing::cols({{1, 0}, {0, 2}}), vec({0.5, 0}));
  const Json out = coloring_outputs(sys, vec({1, -1}));
  CHECK(out["residual_linf"].get<double>() == 2.0);
  CHECK(out["residual_l2"].get<double>() == doctest::Approx(std::sqrt(4.25)));
  CHECK(out["coloring"] == Json::parse("[1.0, -1.0]"));
}

TEST_CASE("gen_beck_fiala") {
  const VectorSystem perm = gen_beck_fiala(4, 4, 1, 1);
  for (Index i = 0; i < 4; ++i) {
    CHECK((perm.vectors().col(i).array() != 0).count() == 1);
    CHECK(perm.vectors().col(i).maxCoeff() == 1.0);
  }
  const VectorSystem bf = gen_beck_fiala(8, 6, 3, 2);
  for (Index i = 0; i < 8; ++i) {
    CHECK((bf.vectors().col(i).array() != 0).count() == 3);
    CHECK(bf.vectors().col(i).norm() == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(bf.lambda().isZero(0.0));
  CHECK(system_to_json(gen_beck_fiala(8, 6, 3, 2)).dump() == system_to_json(bf).dump());
  CHECK_THROWS_AS(gen_beck_fiala(4, 2, 3, 1), PreconditionError);
}

TEST_CASE("gen_komlos") {
  const VectorSystem k = gen_komlos(10, 4, 0.5, 3);
  for (Index i = 0; i < 10; ++i) CHECK(k.vectors().col(i).norm() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(system_to_json(gen_komlos(10, 4, 0.5, 3)).dump() == system_to_json(k).dump());
  const VectorSystem one = gen_komlos(1, 1, 1.0, 4);
  CHECK(std::abs(one.vectors()(0, 0)) == 1.0);
  CHECK_THROWS_AS(gen_komlos(0, 3, 1.0, 1), PreconditionError);
}

TEST_CASE("gen_cube_body half-widths") {
  const double q75 = 0.6744897501960817;  // Phi^{-1}(0.75)
  CHECK(cube_half_width(1, 0.5) == doctest::Approx(q75).epsilon(1e-14));
  CHECK(cube_half_width(2, 0.25) == doctest::Approx(q75).epsilon(1e-14));
  for (Index d : {1, 3, 10}) {
    const double a = cube_half_width(d, 0.5);
    CHECK(std::abs(std::pow(std::erf(a / std::sqrt(2.0)), static_cast<double>(d)) - 0.5) <= 1e-12);
  }
  CHECK_THROWS_AS(cube_half_width(2, 1.0 - 1e-17), PreconditionError);
  CHECK_THROWS_AS(cube_half_width(1, 1.0 - 1e-16), PreconditionError);
  CHECK_THROWS_AS(cube_half_width(2, 0.0), PreconditionError);
}

TEST_CASE("bench rows and CSV") {
  BenchConfig cfg;
  cfg.sizes = {4};
  cfg.trials = 4;
  cfg.seed = 5;
  const auto rows = run_bench(cfg);
  CHECK(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.mean_linf <= r.max_linf);
    if (r.family == "zero") {
      CHECK(r.max_linf == 0.0);
      CHECK(r.baseline_best_linf == 0.0);
    }
  }
  const auto again = run_bench(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].mean_linf == rows[i].mean_linf);
  std::stringstream csv;
  write_bench_csv(csv, rows);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "algorithm,family,n,m,trials,mean_linf,median_linf,max_linf,mean_l2,baseline_best_linf,mean_restarts,wall_ms");
}

}  // TEST_SUITE
