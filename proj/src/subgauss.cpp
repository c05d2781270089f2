#include "vbal/subgauss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vbal/rng.hpp"

namespace vbal {

namespace {

constexpr std::int64_t kMinSamples = 1000;
constexpr double kCoshLimit = 700.0;

void require_samples(const Eigen::MatrixXd& samples, const char* what) {
  if (samples.rows() < kMinSamples) {
    std::ostringstream msg;
    msg << what << ": need at least " << kMinSamples << " samples, got " << samples.rows();
    throw PreconditionError(msg.str());
  }
}

double candidate(double t, std::int64_t exceed, std::int64_t total) {
  const double p = static_cast<double>(exceed) / static_cast<double>(total);
  return t / std::sqrt(2.0 * std::log(2.0 / p));
}

}  // namespace

SubgaussReport estimate_subgaussian(const Eigen::MatrixXd& samples, std::uint64_t seed,
                                    const SubgaussOptions& options) {
  require_samples(samples, "estimate_subgaussian");
  if (options.directions < 1 || options.thresholds < 2 || options.min_exceedances < 1)
    throw PreconditionError("estimate_subgaussian: invalid options");
  const Index n = samples.rows();
  const Index m = samples.cols();
  if (m == 0) throw PreconditionError("estimate_subgaussian: samples have no coordinates");

  SubgaussReport rep;
  rep.directions = options.directions;
  rep.samples = n;
  rep.seed = seed;
  GaussianSource g(seed);
  std::vector<double> mags(static_cast<std::size_t>(n));
  const double ratio = std::pow(50.0, 1.0 / (options.thresholds - 1));

  for (int d = 0; d < options.directions; ++d) {
    const Eigen::VectorXd theta = g.direction(m);
    const Eigen::VectorXd proj = samples * theta;
    const double sigma = std::sqrt(proj.squaredNorm() / static_cast<double>(n));
    if (!(sigma > 0.0)) continue;
    for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(proj[i]);
    std::sort(mags.begin(), mags.end());
    double t = 0.1 * sigma;
    for (int j = 0; j < options.thresholds; ++j, t *= ratio) {
      const auto first = std::lower_bound(mags.begin(), mags.end(), t);
      const auto exceed = static_cast<std::int64_t>(mags.end() - first);
      if (exceed < options.min_exceedances) break;
      const double s = candidate(t, exceed, n);
      if (s > rep.s_hat) {
        rep.s_hat = s;
        rep.worst_direction = theta;
        rep.worst_threshold = t;
      }
    }
  }
  return rep;
}

double tail_candidate(const Eigen::MatrixXd& samples, const Eigen::Ref<const Eigen::VectorXd>& direction,
                      double threshold, std::int64_t min_exceedances) {
  const Eigen::VectorXd proj = samples * direction;
  const auto exceed = static_cast<std::int64_t>((proj.array().abs() >= threshold).count());
  if (exceed < min_exceedances) return std::numeric_limits<double>::quiet_NaN();
  return candidate(threshold, exceed, samples.rows());
}

LaplaceCertificate laplace_certificate(const Eigen::MatrixXd& samples, int n_directions, double sigma_guess,
                                       std::uint64_t seed, double max_relative_se) {
  require_samples(samples, "laplace_certificate");
  if (!(sigma_guess > 0.0)) throw PreconditionError("laplace_certificate: sigma_guess must be positive");
  if (n_directions < 1) throw PreconditionError("laplace_certificate: need at least one direction");
  const Index n = samples.rows();
  const double nd = static_cast<double>(n);

  LaplaceCertificate out;
  double best = -std::numeric_limits<double>::infinity();
  GaussianSource g(seed);
  bool overflow_warned[5] = {};
  constexpr double kMagnitudes[5] = {0.25, 0.5, 1.0, 2.0, 4.0};

  for (int d = 0; d < n_directions; ++d) {
    const Eigen::VectorXd proj = samples * g.direction(samples.cols());
    const double peak = proj.cwiseAbs().maxCoeff();
    for (int k = 0; k < 5; ++k) {
      const double scale = kMagnitudes[k] / sigma_guess;
      if (peak * scale > kCoshLimit) {
        if (!overflow_warned[k]) {
          std::ostringstream msg;
          msg << "magnitude " << kMagnitudes[k] << "/sigma dropped: cosh would overflow";
          out.warnings.push_back(msg.str());
          overflow_warned[k] = true;
        }
        continue;
      }
      const Eigen::ArrayXd c = (scale * proj).array().cosh();
      const double mean = c.mean();
      const double var = (c - mean).square().sum() / std::max(nd - 1.0, 1.0);
      if (std::sqrt(var / nd) > max_relative_se * mean) {
        ++out.cells_skipped;
        continue;
      }
      ++out.cells_used;
      best = std::max(best, mean / std::exp(0.5 * kMagnitudes[k] * kMagnitudes[k]));
    }
  }
  if (out.cells_used > 0) {
    out.beta = best;
    out.implied_s = sigma_guess * std::sqrt(std::log2(std::max(best, 1.0)) + 1.0);
  }
  return out;
}

double coverage_test(const Eigen::MatrixXd& samples, const ConvexBody& body, double scale_c, std::uint64_t seed) {
  if (samples.rows() == 0) throw PreconditionError("coverage_test: no samples");
  if (!(scale_c > 0.0)) throw PreconditionError("coverage_test: scale must be positive");
  if (samples.cols() != body.dim()) throw ContractViolation("coverage_test: dimension mismatch");
  if (symmetry_violations(body, 1000, seed) != 0)
    throw PreconditionError("coverage_test: body failed the symmetry spot-check");
  std::int64_t inside = 0;
  for (Index i = 0; i < samples.rows(); ++i)
    if (body.contains(samples.row(i).transpose() / scale_c)) ++inside;
  return static_cast<double>(inside) / static_cast<double>(samples.rows());
}

double coverage_crossing_scale(const Eigen::MatrixXd& samples, const ConvexBody& body) {
  if (samples.rows() == 0) throw PreconditionError("coverage_crossing_scale: no samples");
  std::vector<double> gauges;
  gauges.reserve(static_cast<std::size_t>(samples.rows()));
  for (Index i = 0; i < samples.rows(); ++i) {
    const GaugeValue gv = gauge_norm(body, samples.row(i).transpose());
    gauges.push_back(gv.unbounded ? 0.0 : gv.value);
  }
  const auto mid = gauges.begin() + static_cast<std::ptrdiff_t>((gauges.size() - 1) / 2);
  std::nth_element(gauges.begin(), mid, gauges.end());
  return *mid;
}

}  // namespace vbal
