#include "circrel/resampler.hpp"

#include <algorithm>
#include <atomic>

#include "circrel/error.hpp"

namespace circrel {

unsigned resolve_threads(unsigned requested, std::size_t work_items) noexcept {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (work_items < n) n = static_cast<unsigned>(std::max<std::size_t>(1, work_items));
  return n;
}

RealizationIndices draw_realization_indices(std::span<const std::size_t> sizes_x,
                                            std::span<const std::size_t> sizes_y,
                                            RandomStream& stream) {
  if (sizes_x.size() != sizes_y.size()) {
    throw Error(ErrorKind::LengthMismatch, "delay and service size vectors differ in length");
  }
  RealizationIndices idx;
  idx.jx.resize(sizes_x.size());
  idx.jy.resize(sizes_y.size());
  for (std::size_t i = 0; i < sizes_x.size(); ++i) {
    if (sizes_x[i] == 0 || sizes_y[i] == 0) {
      throw Error(ErrorKind::EmptySample, "sample size must be >= 1", i);
    }
    idx.jx[i] = stream.uniform_index(sizes_x[i]);
    idx.jy[i] = stream.uniform_index(sizes_y[i]);
  }
  return idx;
}

EstimateReport resample_estimate(const Scenario& scenario, const ResamplingConfig& config) {
  if (config.resamples == 0) throw Error(ErrorKind::InvalidArgument, "resamples must be >= 1");
  require_samples(scenario);

  const std::size_t k = scenario.k();
  std::vector<std::size_t> sizes_x(k), sizes_y(k);
  for (std::size_t i = 0; i < k; ++i) {
    sizes_x[i] = scenario.legs[i].delay.samples.size();
    sizes_y[i] = scenario.legs[i].service.samples.size();
  }

  std::atomic<std::size_t> successes{0};
  parallel_chunks(config.resamples, config.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(k), y(k);
    std::size_t local = 0;
    for (std::size_t l = begin; l < end; ++l) {
      RandomStream stream(config.seed, l);
      const RealizationIndices idx = draw_realization_indices(sizes_x, sizes_y, stream);
      for (std::size_t i = 0; i < k; ++i) {
        x[i] = scenario.legs[i].delay.samples[idx.jx[i]];
        y[i] = scenario.legs[i].service.samples[idx.jy[i]];
      }
      if (indicator_phi(x, y, scenario.plan)) ++local;
    }
    successes += local;
  });

  EstimateReport report;
  report.resamples = config.resamples;
  report.seed = config.seed;
  report.success_count = successes.load();
  report.theta_star =
      static_cast<double>(report.success_count) / static_cast<double>(config.resamples);
  return report;
}

}  // namespace circrel
