#include "vbal/coloring.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "vbal/normal.hpp"
#include "vbal/rng.hpp"

namespace vbal {

namespace {

constexpr double kVertexTol = 1e-8;

std::string measure_warning(const MeasureEstimate& m) {
  if (m.samples == 0 || m.p_hat >= 0.5 - 3.0 * m.ci_halfwidth) return {};
  std::ostringstream msg;
  msg << "estimated Gaussian measure " << m.p_hat << " (+-" << m.ci_halfwidth << ") is below 1/2";
  return msg.str();
}

MeasureEstimate body_measure(const ConvexBody& body, std::int64_t samples, std::uint64_t seed,
                             std::vector<std::string>& warnings) {
  if (samples < 100) return {};
  MeasureEstimate m = gaussian_measure(body, samples, derive_seed(seed, 0x6d65617375726501ULL));
  if (auto w = measure_warning(m); !w.empty()) warnings.push_back(std::move(w));
  return m;
}

double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm(); }

}  // namespace

WalkStrategy::WalkStrategy(WalkMode mode, double c) : mode_(mode), c_(c) {
  if (!(c > 0.0)) throw PreconditionError("WalkStrategy: c must be positive");
}

double WalkStrategy::side_length_bound(Index n) const {
  if (n <= 1) return 2.0;
  return std::min(2.0 * c_ / std::sqrt(std::log(static_cast<double>(n))), 2.0);
}

Eigen::VectorXd WalkStrategy::color(const VectorSystem& local, const ConvexBody&, std::uint64_t seed) const {
  if (local.count() == 0) return Eigen::VectorXd(0);
  WalkParams params = walk_params(local.count(), mode_);
  params.seed = seed;
  return sample_coloring(local, params).chi;
}

double asym_alpha() { return 4.0 * (1.0 + std::numbers::pi * std::sqrt(8.0 * std::log(2.0))); }

double asym_delta_rc() { return 1.0 / (32.0 * std::sqrt(2.0 * std::numbers::pi)); }

AsymResult color_asymmetric(const ConvexBody& body, const VectorSystem& sys, const SymmetricStrategy& strategy,
                            const AsymPipelineConfig& cfg) {
  if (body.dim() != sys.dim()) throw ContractViolation("color_asymmetric: body and system dimensions differ");
  if (!(cfg.alpha > 0.0)) throw PreconditionError("color_asymmetric: alpha must be positive");
  const Index n = sys.count();
  const double side = 2.0 * sys.max_column_norm();
  const double allowed = strategy.side_length_bound(n) / cfg.alpha;
  if (side > allowed * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "color_asymmetric: side length " << side << " exceeds " << allowed << " for strategy '"
        << strategy.name() << "'";
    throw PreconditionError(msg.str());
  }

  AsymResult out;
  out.body_measure = body_measure(body, cfg.measure_samples, cfg.seed, out.warnings);
  const FaceState start = FaceState::at_coloring(sys, reduce_to_independent(sys));
  RecenterOptions rc_opts;
  rc_opts.delta = cfg.delta_rc;
  rc_opts.epsilon = cfg.epsilon_rc;
  rc_opts.paouris_beta = cfg.paouris_beta;
  rc_opts.measure_samples = cfg.measure_samples;

  for (int attempt = 0; attempt <= cfg.max_outer_restarts; ++attempt) {
    out.attempts = attempt + 1;
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt));
    RecenterResult rc;
    try {
      rc = recenter(body, sys, start, rc_opts, derive_seed(s, 1));
    } catch (const RejectionExhausted&) {
      ++out.recenter_failures;
      continue;
    }
    if (!rc.ok()) {
      ++out.recenter_failures;
      continue;
    }

    const FaceState& face = rc.face;
    const std::vector<Index>& active = face.active();
    const Index k = face.dim();
    Eigen::VectorXd chi = face.coordinates();
    Eigen::VectorXd local_vertex = Eigen::VectorXd::Zero(k);
    if (k > 0) {
      Eigen::MatrixXd local_v(k, k);
      Eigen::VectorXd local_lambda(k);
      for (Index j = 0; j < k; ++j) {
        local_v.col(j) = cfg.alpha * (face.basis().transpose() * sys.vectors().col(active[j]));
        local_lambda[j] = face.coordinates()[active[j]];
      }
      const VectorSystem local(local_v, local_lambda);
      const ConvexBody local_body = scaled(symmetrize(restrict(body, face.basis(), face.point())), cfg.alpha);
      if (symmetry_violations(local_body, 1000, derive_seed(s, 2)) != 0)
        throw ContractViolation("color_asymmetric: symmetrized body failed the symmetry check");
      Eigen::VectorXd z;
      try {
        z = strategy.color(local, local_body, derive_seed(s, 3));
      } catch (const BudgetExhausted&) {
        ++out.strategy_failures;
        continue;
      }
      if (z.size() != k || (z.cwiseAbs().array() != 1.0).any())
        throw ContractViolation("color_asymmetric: strategy returned a non-coloring");
      local_vertex = local.residual(z);
      for (Index j = 0; j < k; ++j) chi[active[j]] = z[j];
    }

    const Eigen::VectorXd vertex = sys.residual(chi);
    const Eigen::VectorXd claimed = face.point() + face.basis() * local_vertex / cfg.alpha;
    if (distance(vertex, claimed) > kVertexTol * (1.0 + vertex.norm()))
      throw NumericalError("color_asymmetric: lifted vertex disagrees with the local solution");
    if (!body.contains(vertex)) {
      ++out.membership_rejections;
      continue;
    }
    out.chi = std::move(chi);
    out.vertex = vertex;
    out.recentering = std::move(rc);
    return out;
  }
  std::ostringstream msg;
  msg << "color_asymmetric: no accepted coloring after " << out.attempts << " attempts (recenter failures "
      << out.recenter_failures << ", strategy failures " << out.strategy_failures << ", membership rejections "
      << out.membership_rejections << ")";
  throw BudgetExhausted(msg.str());
}

double body_centric_beta() {
  const double pi = std::numbers::pi;
  const double ln2 = std::log(2.0);
  return 1.0 + pi * std::sqrt(8.0 * ln2) + 4.0 * pi * std::sqrt(ln2);
}

double body_centric_c0() { return 1.0 / normal_quantile(0.6); }

double BodyCentricConfig::alpha_n(Index n) const {
  return std::min(v0, 1.0 / (10.0 * std::sqrt(std::log(2.0 * static_cast<double>(n)))));
}

double BodyCentricConfig::eta_n(Index n) const {
  return std::min({eta0, asym_delta_rc(), 1.0 / (14.0 * c0 * static_cast<double>(n))});
}

double BodyCentricConfig::epsilon_rc(Index n) const { return 1.0 / (2.0 * (static_cast<double>(n) + 1.0)); }

BodyCentricResult color_body_centric(const ConvexBody& body, const VectorSystem& sys,
                                     const BodyCentricConfig& cfg) {
  if (body.dim() != sys.dim()) throw ContractViolation("color_body_centric: body and system dimensions differ");
  const Index n = sys.count();
  if (n == 0) throw PreconditionError("color_body_centric: empty system");
  if (2.0 * sys.max_column_norm() > 2.0 * cfg.alpha_n(n) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "color_body_centric: vector norms must be at most alpha_n = " << cfg.alpha_n(n);
    throw PreconditionError(msg.str());
  }
  if (!(cfg.beta > 0.0)) throw PreconditionError("color_body_centric: beta must be positive");

  BodyCentricResult out;
  out.body_measure = body_measure(body, cfg.measure_samples, cfg.seed, out.warnings);
  const FaceState start = FaceState::at_coloring(sys, reduce_to_independent(sys));
  RecenterOptions rc_opts;
  rc_opts.delta = cfg.eta_n(n);
  rc_opts.epsilon = cfg.epsilon_rc(n);
  rc_opts.paouris_beta = cfg.paouris_beta;
  rc_opts.measure_samples = 0;

  for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    out.restarts = attempt;
    out.descents = 0;
    out.dims.clear();
    out.barycenter_norms.clear();
    const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt));
    try {
      const RecenterResult first = recenter(body, sys, start, rc_opts, derive_seed(s, 0));
      if (!first.ok()) continue;
      out.descents += first.descents;
      out.dims.push_back(first.face.dim());
      out.barycenter_norms.push_back(first.barycenter_norm);

      // Scale by beta about q: P_s = beta (P - q), K_s = beta (K - q).
      const Eigen::VectorXd q = first.face.point();
      const VectorSystem sys_s(cfg.beta * sys.vectors(), first.face.coordinates());
      const ConvexBody body_s = scaled(shifted(body, -q), cfg.beta);
      FaceState face = FaceState::at_coloring(sys_s, FractionalColoring(first.face.coordinates()));

      bool failed = false;
      for (std::uint64_t round = 1; !face.is_vertex(); ++round) {
        const RecenterResult rc = recenter(body_s, sys_s, face, rc_opts, derive_seed(s, round));
        if (!rc.ok()) {
          failed = true;
          break;
        }
        face = rc.face;
        out.descents += rc.descents;
        out.dims.push_back(face.dim());
        out.barycenter_norms.push_back(rc.barycenter_norm);
        if (face.is_vertex()) break;
        const BoundaryPoint bp = min_norm_boundary_point(face, sys_s);
        face = descend_face(face, sys_s, bp.point);
        ++out.descents;
        out.dims.push_back(face.dim());
      }
      if (failed) continue;

      Eigen::VectorXd chi = face.coordinates();
      const Eigen::VectorXd candidate = q + face.point() / cfg.beta;
      const Eigen::VectorXd vertex = sys.residual(chi);
      if ((vertex - candidate).norm() > kVertexTol * (1.0 + vertex.norm()))
        throw NumericalError("color_body_centric: scaled bookkeeping disagrees with V chi - t");
      if (!body.contains(candidate)) continue;
      out.chi = std::move(chi);
      out.vertex = vertex;
      return out;
    } catch (const RejectionExhausted&) {
      continue;
    }
  }
  std::ostringstream msg;
  msg << "color_body_centric: no accepted coloring after " << cfg.max_restarts + 1 << " attempts";
  throw BudgetExhausted(msg.str());
}

}  // namespace vbal
