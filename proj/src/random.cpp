#include "alloy/random.hpp"

namespace alloy {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream_id))) {}

std::uint64_t retry_stream_id(std::uint64_t index, std::uint64_t attempt) {
  return attempt == 0 ? index : splitmix64(index) ^ splitmix64(attempt * 0x632be59bd9b4e019ULL);
}

}  // namespace alloy
