#pragma once

#include <cstdint>
#include <random>

namespace alloy {

std::uint64_t splitmix64(std::uint64_t x);

/// Independent random stream keyed by (seed, stream id). Streams are derived
/// per sample index, so results do not depend on how samples are split
/// between workers.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// Stream id for retry `attempt` of sample `index`; attempt 0 is the plain index.
std::uint64_t retry_stream_id(std::uint64_t index, std::uint64_t attempt);

}  // namespace alloy
