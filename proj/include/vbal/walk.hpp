#pragma once

// Subgaussian random walk producing full colorings: each step moves the
// fractional coloring by gamma * U r with U U^T = Sigma solving the Komlos
// program on the active coordinates and r uniform in {-1, 1}^n.

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vbal/zonotope.hpp"

namespace vbal {

enum class WalkMode { paper, practical };

std::string_view to_string(WalkMode mode);
WalkMode parse_walk_mode(std::string_view text);

struct WalkParams {
  double gamma = 0.0;          ///< step size
  double delta = 0.0;          ///< freeze threshold: i stays active while |chi_i| < 1 - delta
  std::int64_t steps = 0;      ///< step budget T per attempt
  WalkMode mode = WalkMode::practical;
  int max_restarts = 64;
  std::uint64_t seed = 0;
};

/// Paper mode: gamma = 2 log2(2n) / n^{5/2}, delta = 2 sqrt(2 ln2 log2(2n)) / n,
/// T = ceil(2 / gamma^2) * ceil(log2(2n)).
/// Practical mode: delta = 0.1, gamma = min(delta / (2 sqrt n), 0.05), T = ceil(8 / gamma^2).
WalkParams walk_params(Index n, WalkMode mode);

struct WalkTrace {
  Eigen::VectorXd chi;       ///< entries exactly +-1
  std::int64_t steps_taken = 0;
  int restarts = 0;
  int sigma_recomputes = 0;
  Eigen::VectorXd residual;  ///< V chi - t
};

/// One executed step, as seen by an observer.
struct WalkStep {
  int attempt;
  std::int64_t step;
  const Eigen::VectorXd& before;
  const Eigen::VectorXd& after;
  const std::vector<Index>& active;  ///< A(t), the coordinates allowed to move
};

using WalkObserver = std::function<void(const WalkStep&)>;

/// Runs the walk from chi(0) = lambda until every coordinate is frozen,
/// restarting with a fresh stream (seed, attempt) when the budget runs out.
WalkTrace sample_coloring(const VectorSystem& sys, const WalkParams& params,
                          const WalkObserver& observer = {});

}  // namespace vbal
