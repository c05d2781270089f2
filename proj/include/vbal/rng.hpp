#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Core>

namespace vbal {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed; used for per-attempt and per-chunk substreams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag ^ 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t tag2) noexcept {
  return derive_seed(derive_seed(seed, tag), tag2);
}

/// Counter-based generator: output k of stream (seed, stream) is a pure
/// function of (seed, stream, k). Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(derive_seed(seed, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return mix64(key_ + mix64(counter_++)); }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard-normal source bound to one counter stream.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(seed, stream) {}

  double operator()() { return normal_(rng_); }

  void fill(Eigen::Ref<Eigen::VectorXd> out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal_(rng_);
  }

  Eigen::VectorXd vector(Eigen::Index dim) {
    Eigen::VectorXd x(dim);
    fill(x);
    return x;
  }

  /// Uniform direction on the unit sphere (dim >= 1).
  Eigen::VectorXd direction(Eigen::Index dim) {
    Eigen::VectorXd x(dim);
    double norm = 0.0;
    do {
      fill(x);
      norm = x.norm();
    } while (norm == 0.0);
    return x / norm;
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  CounterRng& engine() { return rng_; }

 private:
  CounterRng rng_;
  std::normal_distribution<double> normal_;
};

/// Fills `out` with independent uniform +-1 entries.
inline void fill_rademacher(CounterRng& rng, Eigen::Ref<Eigen::VectorXd> out) {
  std::uint64_t bits = 0;
  int left = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    out[i] = (bits & 1U) ? 1.0 : -1.0;
    bits >>= 1;
    --left;
  }
}

}  // namespace vbal
