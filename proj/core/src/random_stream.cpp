#include "circrel/random_stream.hpp"

#include <cmath>

namespace circrel {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x9E3779B97F4A7C15ull));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(derive_stream_seed(seed, stream_id)) {}

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = n;
  // Reject the low (2^64 mod n) values so the remainder is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

double RandomStream::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

}  // namespace circrel
