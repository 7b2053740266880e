#pragma once

#include <cstdint>
#include <random>

namespace lrsim {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of sub-stream `stream` of `master`.
///
/// Rule: splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15). Chains,
/// replicates and Monte-Carlo partitions all derive their generators this
/// way so results depend only on the master seed and the stream index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

/// Uniform on [0, 1).
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform on (0, 1].
inline double uniform_open_closed(Rng& rng) { return 1.0 - uniform01(rng); }

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace lrsim
