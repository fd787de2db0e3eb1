#pragma once

// Ground truth for the estimator, computed without any of the kernel or
// omega-pair machinery: exhaustive enumeration for tiny discrete instances
// and brute-force Monte Carlo over the full generative model.

#include <cstddef>
#include <cstdint>

#include "circrel/plan_model.hpp"

namespace circrel {

/// What is random when enumerating.
enum class SampleTreatment {
  /// Samples are fixed; only the resampling indices are random.
  fixed,
  /// Each side's listed values define a uniform discrete law and the sample
  /// itself (same size) is drawn from it before resampling.
  random,
};

struct ExactOracleResult {
  double expected_theta_star = 0.0;
  double exact_variance = 0.0;
  std::uint64_t term_count = 0;
};

inline constexpr std::uint64_t kMaxEnumeratedOutcomes = 100'000'000;

ExactOracleResult enumerate_exact(const Scenario& scenario, std::size_t resamples,
                                  SampleTreatment treatment = SampleTreatment::fixed);

struct MonteCarloResult {
  double mean_theta_star = 0.0;
  double empirical_variance = 0.0;
  std::size_t replications = 0;
  double standard_error_of_variance = 0.0;
  double standard_error_of_mean = 0.0;

  friend bool operator==(const MonteCarloResult&, const MonteCarloResult&) = default;
};

inline constexpr std::size_t kMinReplications = 1000;

/// Repeatedly draws fresh samples (sizes from each side's sample_size or
/// sample count; exponential sides draw from their rate, sample-only sides
/// from their listed values), runs the resampling estimator and reports the
/// spread of the estimates. Replication q uses streams derived from
/// (seed, q), so results do not depend on `threads`.
MonteCarloResult simulate_pipeline_variance(const Scenario& scenario, std::size_t resamples,
                                            std::size_t replications, std::uint64_t seed,
                                            unsigned threads = 1);

}  // namespace circrel
