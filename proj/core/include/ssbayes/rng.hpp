#pragma once

#include <cstdint>
#include <random>

namespace ssbayes {

/// Seeded random-number core.
///
/// Wraps std::mt19937_64, whose output stream is pinned bit-exactly by the
/// C++ standard, and layers hand-written distribution transforms on top so
/// that every draw is a deterministic function of (seed, call sequence).
/// The standard-library distribution classes are deliberately not used:
/// their algorithms are implementation-defined and would break cross-platform
/// reproducibility.
///
/// A single RngState must not be shared across threads; derive independent
/// substreams with substream() instead.
class RngState {
 public:
  explicit RngState(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Raw 64 uniform bits.
  std::uint64_t next_u64();

  /// Uniform on (0, 1), 53-bit resolution, never exactly 0 or 1.
  double uniform();

  /// Standard normal via the Marsaglia polar method (pair-cached).
  double normal();

  /// Gamma(shape, 1), shape > 0. Marsaglia-Tsang squeeze for shape >= 1,
  /// boosted by u^(1/shape) below 1. Throws InvalidParameter on shape <= 0.
  double gamma(double shape);

  /// Chi-square with dof > 0.
  double chi_square(double dof);

  /// Independent substream derived from (seed, index) by splitmix64.
  /// Used for per-replicate seeding in experiment harnesses.
  RngState substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// The splitmix64 mix function; documented here because per-replicate seeds
/// are derived as splitmix64(master_seed + index) and results must be
/// reproducible from the manifest alone.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ssbayes
