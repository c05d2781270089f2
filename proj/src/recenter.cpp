#include "vbal/recenter.hpp"

#include <cmath>

#include "vbal/rng.hpp"

namespace vbal {

namespace {

MeasureEstimate restricted_measure(const ConvexBody& body, const FaceState& face, std::int64_t samples,
                                   std::uint64_t seed) {
  if (samples <= 0) return {};
  return gaussian_measure(restrict(body, face.basis(), face.point()), samples, seed);
}

}  // namespace

RecenterResult recenter(const ConvexBody& body, const VectorSystem& sys, const FaceState& start,
                        const RecenterOptions& options, std::uint64_t seed) {
  if (!(options.delta > 0.0)) throw PreconditionError("recenter: delta must be positive");
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0))
    throw PreconditionError("recenter: epsilon must lie in (0, 1)");
  if (body.dim() != sys.dim()) throw ContractViolation("recenter: body and system dimensions differ");

  const double delta = options.delta;
  const std::int64_t budget =
      static_cast<std::int64_t>(std::ceil(24.0 / (delta * delta))) + static_cast<std::int64_t>(sys.count());
  const double eps_call = options.epsilon / static_cast<double>(budget);

  RecenterResult out;
  out.face = start;
  out.q = start.point();
  if (!body.contains(start.point())) {
    out.fail_reason = "starting point is not in K";
    return out;
  }
  out.measure_before = restricted_measure(body, start, options.measure_samples, derive_seed(seed, 2, 0));

  auto finish = [&](RecenterStatus status, std::string reason) {
    out.q = out.face.point();
    if (status == RecenterStatus::ok && !body.contains(out.q)) {
      status = RecenterStatus::fail;
      reason = "final point failed the membership check";
    }
    out.status = status;
    out.fail_reason = std::move(reason);
    out.measure_after = restricted_measure(body, out.face, options.measure_samples, derive_seed(seed, 2, 1));
    return out;
  };

  for (std::int64_t it = 1; it <= budget; ++it) {
    out.iterations = it;
    if (out.face.is_vertex()) {
      out.barycenter_norm = 0.0;
      return finish(RecenterStatus::ok, {});
    }
    const ConvexBody local = restrict(body, out.face.basis(), out.face.point());
    const BarycenterEstimate est =
        barycenter(local, delta / 6.0, eps_call, derive_seed(seed, 1, static_cast<std::uint64_t>(it)),
                   options.paouris_beta);
    out.barycenter_samples += est.samples_used;
    out.barycenter_norm = est.b_hat.norm();
    if (!local.contains(est.b_hat)) return finish(RecenterStatus::fail, "barycenter estimate outside K");
    if (out.barycenter_norm <= delta / 2.0) return finish(RecenterStatus::ok, {});

    const Eigen::VectorXd b = out.face.basis() * est.b_hat;
    const RayExit exit = ray_exit(out.face, sys, b);
    const Eigen::VectorXd step = exit.hit ? Eigen::VectorXd(exit.lambda * b) : b;
    const Index before = out.face.dim();
    out.face = descend_face(out.face, sys, step);
    if (out.face.dim() < before) ++out.descents;
  }
  return finish(RecenterStatus::fail, "iteration budget exhausted");
}

RecenterResult recenter(const ConvexBody& body, const VectorSystem& sys, double delta, double epsilon,
                        std::uint64_t seed) {
  const FaceState start = FaceState::at_coloring(sys, reduce_to_independent(sys));
  RecenterOptions options;
  options.delta = delta;
  options.epsilon = epsilon;
  return recenter(body, sys, start, options, seed);
}

}  // namespace vbal
