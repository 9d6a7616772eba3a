#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace simplex_langevin {

/// Source of standard normal draws consumed by the noise sampler.
template <class G>
concept GaussianSource = requires(G& g) {
  { g.normal() } -> std::convertible_to<double>;
};

/// SplitMix64 finalizer; used to derive well-separated seeds for substreams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator addressed by (seed, stream). Two generators with the same
/// pair produce the same sequence; different streams are independent for all
/// practical purposes. Each run (and each simplex block of a multi-agent run)
/// owns its own stream so results do not depend on evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream),
        engine_(mix64(seed ^ mix64(stream + 0x5851f42d4c957f2dULL))) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Independent generator for sub-task `k` of this stream.
  Rng substream(std::uint64_t k) const {
    return Rng(mix64(seed_ + 0x2545f4914f6cdd1dULL * (stream_ + 1)), k);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Always returns z = 0: isolates the deterministic drift of the Langevin step.
struct ZeroGaussian {
  double normal() const { return 0.0; }
};

}  // namespace simplex_langevin
