#pragma once

// Circulation plan, per-leg stochastic models and the success indicator.
//
// A plan with k legs succeeds when, for every leg i, the arrival delay plus
// the ground service time fits in the scheduled slack:  x_i + y_i <= t_i.
// Ties count as success. All durations share one caller-chosen time unit.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace circrel {

/// Slack between scheduled arrival and next departure, one entry per leg.
struct CirculationPlan {
  std::vector<double> intervals;

  std::size_t legs() const noexcept { return intervals.size(); }
};

/// Observed delay and service samples for one leg.
struct LegSamples {
  std::vector<double> delays;
  std::vector<double> services;
};

/// Exponential delay and service laws for one leg (rates in 1/time).
struct ExponentialLegModel {
  double delay_rate = 0.0;
  double service_rate = 0.0;
};

/// What is known about one side (delay or service) of a leg: an exponential
/// rate, observed samples, or both. `sample_size` overrides the number of
/// observations assumed by variance analytics; without it the sample count
/// is used.
struct SideModel {
  std::optional<double> rate;
  std::vector<double> samples;
  std::optional<std::size_t> sample_size;

  bool has_samples() const noexcept { return !samples.empty(); }
  bool has_rate() const noexcept { return rate.has_value(); }

  /// n_i used by the coincidence probabilities; 0 when unknown.
  std::size_t resample_size() const noexcept {
    if (sample_size) return *sample_size;
    return samples.size();
  }
};

struct Leg {
  SideModel delay;
  SideModel service;

  /// Both sides as samples, if both carry samples.
  std::optional<LegSamples> samples() const;
  /// Both rates, if both sides are exponential.
  std::optional<ExponentialLegModel> exponential() const;

  static Leg from_samples(LegSamples s);
  static Leg from_exponential(ExponentialLegModel m, std::optional<std::size_t> sample_size = {});
};

struct Scenario {
  CirculationPlan plan;
  std::vector<Leg> legs;
  std::string label;
  std::string time_unit;

  std::size_t k() const noexcept { return plan.legs(); }
};

/// Checks every invariant and returns the scenario unchanged; throws
/// circrel::Error naming the first offending leg otherwise.
Scenario validate_scenario(Scenario raw);

/// Throws MissingSamples unless every leg carries delay and service samples.
void require_samples(const Scenario& scenario);

/// 1 iff x_i + y_i <= t_i on every leg.
bool indicator_phi(std::span<const double> x, std::span<const double> y,
                   const CirculationPlan& plan);

/// Product of per-leg reliabilities; each must lie in [0, 1].
double plan_reliability(std::span<const double> per_leg);

}  // namespace circrel
