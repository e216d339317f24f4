#pragma once

#include "specbreak/types.hpp"

#include <cstdint>
#include <random>

namespace specbreak {

/// Seed used by the CLI and experiment harness when none is given.
inline constexpr std::uint64_t kDefaultSeed = 20130611;

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/**
 * Seed of substream `index` derived from `master`.
 *
 * The map is a pure function of (master, index), so a replicate or run can be
 * regenerated in isolation and results do not depend on evaluation order.
 */
[[nodiscard]] std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Standard normal draws from a seeded 64-bit Mersenne twister.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  double operator()() { return normal_(engine_); }

  /// rows x cols matrix filled in time-major order (row by row).
  [[nodiscard]] Eigen::MatrixXd matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace specbreak
