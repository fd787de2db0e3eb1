#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "circrel/plan_model.hpp"
#include "circrel/random_stream.hpp"

namespace circrel {

/// Indices drawn for one realization: jx[i] into leg i's delay sample and
/// jy[i] into its service sample.
struct RealizationIndices {
  std::vector<std::size_t> jx;
  std::vector<std::size_t> jy;

  friend bool operator==(const RealizationIndices&, const RealizationIndices&) = default;
};

struct ResamplingConfig {
  std::size_t resamples = 1;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks hardware concurrency. Never affects results.
  unsigned threads = 1;
};

struct EstimateReport {
  double theta_star = 0.0;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  std::size_t success_count = 0;

  friend bool operator==(const EstimateReport&, const EstimateReport&) = default;
};

/// One independent uniform index per sample (2k draws).
RealizationIndices draw_realization_indices(std::span<const std::size_t> sizes_x,
                                            std::span<const std::size_t> sizes_y,
                                            RandomStream& stream);

/// Resampling estimate: the fraction of r realizations in which every leg
/// fits its slack. Realization l draws from stream (seed, l), so the report
/// depends only on (scenario, resamples, seed).
EstimateReport resample_estimate(const Scenario& scenario, const ResamplingConfig& config);

unsigned resolve_threads(unsigned requested, std::size_t work_items) noexcept;

/// Runs body(begin, end) over [0, count) split into contiguous chunks, one per
/// worker. Used wherever independent items are evaluated in parallel.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  const unsigned workers = resolve_threads(threads, count);
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    if (begin == end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace circrel
