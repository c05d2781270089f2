#include "vbal/walk.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "vbal/komlos.hpp"
#include "vbal/rng.hpp"

namespace vbal {

namespace {

constexpr double kBoundSlack = 1e-9;

std::vector<Index> active_set(const Eigen::VectorXd& chi, double delta) {
  std::vector<Index> out;
  for (Index i = 0; i < chi.size(); ++i)
    if (std::abs(chi[i]) < 1.0 - delta) out.push_back(i);
  return out;
}

}  // namespace

std::string_view to_string(WalkMode mode) {
  return mode == WalkMode::paper ? "paper" : "practical";
}

WalkMode parse_walk_mode(std::string_view text) {
  if (text == "paper") return WalkMode::paper;
  if (text == "practical") return WalkMode::practical;
  throw PreconditionError("unknown walk mode '" + std::string(text) + "'");
}

WalkParams walk_params(Index n, WalkMode mode) {
  if (n < 1) throw PreconditionError("walk_params: n must be at least 1");
  const double nd = static_cast<double>(n);
  WalkParams p;
  p.mode = mode;
  if (mode == WalkMode::paper) {
    const double lg = std::log2(2.0 * nd);
    p.gamma = 2.0 * lg / std::pow(nd, 2.5);
    p.delta = 2.0 * std::sqrt(2.0 * std::log(2.0) * lg) / nd;
    p.steps = static_cast<std::int64_t>(std::ceil(2.0 / (p.gamma * p.gamma))) *
              static_cast<std::int64_t>(std::ceil(lg));
  } else {
    p.delta = 0.1;
    p.gamma = std::min(p.delta / (2.0 * std::sqrt(nd)), 0.05);
    p.steps = static_cast<std::int64_t>(std::ceil(8.0 / (p.gamma * p.gamma)));
  }
  return p;
}

WalkTrace sample_coloring(const VectorSystem& sys, const WalkParams& params,
                          const WalkObserver& observer) {
  const Index n = sys.count();
  const double root_n = std::sqrt(static_cast<double>(n));
  if (sys.max_column_norm() > 1.0 + 1e-10)
    throw PreconditionError("sample_coloring: vectors must have norm at most 1");
  if (!(params.gamma > 0.0) || params.steps < 0 || params.max_restarts < 0)
    throw PreconditionError("sample_coloring: invalid walk parameters");
  if (params.mode == WalkMode::practical &&
      !(params.gamma * root_n < params.delta && params.delta < 1.0))
    throw PreconditionError("sample_coloring: practical mode needs gamma * sqrt(n) < delta < 1");

  const double step_bound = params.gamma * root_n + 1e-12;
  WalkTrace trace;
  Eigen::VectorXd signs(n);
  Eigen::VectorXd move(n);

  for (int attempt = 0; attempt <= params.max_restarts; ++attempt) {
    CounterRng rng(params.seed, static_cast<std::uint64_t>(attempt));
    Eigen::VectorXd chi = sys.lambda();
    std::vector<Index> active = active_set(chi, params.delta);
    std::vector<Index> cached;
    bool have_sigma = false;
    Eigen::MatrixXd u_active;  // rows of U for the active coordinates

    for (std::int64_t t = 1; t <= params.steps && !active.empty(); ++t) {
      if (!have_sigma || active != cached) {
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
        for (Index i : active) alpha[i] = 1.0;
        const auto sol = solve_komlos(sys.vectors(), alpha);
        u_active.resize(static_cast<Index>(active.size()), n);
        for (std::size_t r = 0; r < active.size(); ++r)
          u_active.row(static_cast<Index>(r)) = sol.U.row(active[r]);
        cached = active;
        have_sigma = true;
        ++trace.sigma_recomputes;
      }

      fill_rademacher(rng, signs);
      const Eigen::VectorXd before = observer ? chi : Eigen::VectorXd();
      const Eigen::VectorXd increment = params.gamma * (u_active * signs);
      for (std::size_t r = 0; r < active.size(); ++r) {
        const Index i = active[r];
        const double d = increment[static_cast<Index>(r)];
        chi[i] += d;
        if (std::abs(d) > step_bound || std::abs(chi[i]) > 1.0 + kBoundSlack) {
          std::ostringstream msg;
          msg << "sample_coloring: coordinate " << i << " left [-1, 1] or overstepped (chi = "
              << chi[i] << ", step = " << d << ")";
          throw NumericalError(msg.str());
        }
      }
      ++trace.steps_taken;
      if (observer) observer(WalkStep{attempt, t, before, chi, active});
      active = active_set(chi, params.delta);
    }

    if (active.empty()) {
      trace.chi.resize(n);
      for (Index i = 0; i < n; ++i) trace.chi[i] = chi[i] < 0.0 ? -1.0 : 1.0;
      trace.restarts = attempt;
      trace.residual = sys.residual(trace.chi);
      return trace;
    }
  }
  std::ostringstream msg;
  msg << "sample_coloring: walk did not freeze all coordinates within " << params.max_restarts
      << " restarts";
  throw BudgetExhausted(msg.str());
}

}  // namespace vbal
