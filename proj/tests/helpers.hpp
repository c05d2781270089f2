#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <doctest.h>

#include "vbal/rng.hpp"

namespace testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Eigen::MatrixXd cols(std::initializer_list<std::initializer_list<double>> columns) {
  std::vector<Eigen::VectorXd> cs;
  for (auto c : columns) cs.push_back(vec(c));
  Eigen::MatrixXd m(cs.front().size(), static_cast<Eigen::Index>(cs.size()));
  for (std::size_t j = 0; j < cs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cs[j];
  return m;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Random matrix with unit columns.
inline Eigen::MatrixXd unit_columns(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  vbal::GaussianSource g(seed);
  Eigen::MatrixXd v(m, n);
  for (Eigen::Index j = 0; j < n; ++j) v.col(j) = g.direction(m);
  return v;
}

}  // namespace testing
