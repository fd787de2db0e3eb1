#pragma once

// Reproducible random streams.
//
// Stream (seed, id) is a std::mt19937_64 seeded with
//   splitmix64(splitmix64(seed) ^ splitmix64(id + 0x9E3779B97F4A7C15)).
// Bounded integers use rejection sampling and doubles take the top 53 bits,
// so every draw is bit-identical across standard library implementations.
// This algorithm is part of the reproducibility contract; changing it
// changes every seeded result.

#include <cstddef>
#include <cstdint>
#include <random>

namespace circrel {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept;

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on {0, ..., n - 1}; n must be >= 1.
  std::size_t uniform_index(std::size_t n);

  /// Uniform on [0, 1).
  double uniform01();

  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace circrel
