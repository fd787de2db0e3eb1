#include "circrel/plan_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "circrel/error.hpp"

namespace circrel {
namespace {

void validate_side(const SideModel& side, std::size_t leg, const char* name) {
  if (!side.has_rate() && !side.has_samples()) {
    throw Error(ErrorKind::EmptySample,
                std::string(name) + " side has neither samples nor a rate", leg);
  }
  if (side.rate && !(std::isfinite(*side.rate) && *side.rate > 0.0)) {
    throw Error(ErrorKind::NonpositiveRate, std::string(name) + " rate must be positive and finite",
                leg);
  }
  for (double v : side.samples) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::InvalidSample,
                  std::string(name) + " sample " + std::to_string(v) +
                      " is negative or not finite",
                  leg);
    }
  }
  if (side.sample_size && *side.sample_size == 0) {
    throw Error(ErrorKind::EmptySample, std::string(name) + " sample_size must be >= 1", leg);
  }
}

}  // namespace

std::optional<LegSamples> Leg::samples() const {
  if (!delay.has_samples() || !service.has_samples()) return std::nullopt;
  return LegSamples{delay.samples, service.samples};
}

std::optional<ExponentialLegModel> Leg::exponential() const {
  if (!delay.rate || !service.rate) return std::nullopt;
  return ExponentialLegModel{*delay.rate, *service.rate};
}

Leg Leg::from_samples(LegSamples s) {
  Leg leg;
  leg.delay.samples = std::move(s.delays);
  leg.service.samples = std::move(s.services);
  return leg;
}

Leg Leg::from_exponential(ExponentialLegModel m, std::optional<std::size_t> sample_size) {
  Leg leg;
  leg.delay.rate = m.delay_rate;
  leg.service.rate = m.service_rate;
  leg.delay.sample_size = sample_size;
  leg.service.sample_size = sample_size;
  return leg;
}

Scenario validate_scenario(Scenario raw) {
  if (raw.plan.legs() == 0) throw Error(ErrorKind::EmptyPlan, "plan has no legs");
  for (std::size_t i = 0; i < raw.plan.legs(); ++i) {
    const double t = raw.plan.intervals[i];
    if (!std::isfinite(t)) throw Error(ErrorKind::NegativeSlack, "slack is not finite", i);
    if (t < 0.0) throw Error(ErrorKind::NegativeSlack, "slack " + std::to_string(t) + " < 0", i);
  }
  if (raw.legs.size() != raw.plan.legs()) {
    const std::size_t first_bad = std::min(raw.legs.size(), raw.plan.legs());
    throw Error(ErrorKind::LegCountMismatch,
                "plan has " + std::to_string(raw.plan.legs()) + " intervals but " +
                    std::to_string(raw.legs.size()) + " legs were supplied",
                first_bad);
  }
  for (std::size_t i = 0; i < raw.legs.size(); ++i) {
    validate_side(raw.legs[i].delay, i, "delay");
    validate_side(raw.legs[i].service, i, "service");
  }
  return raw;
}

void require_samples(const Scenario& scenario) {
  for (std::size_t i = 0; i < scenario.legs.size(); ++i) {
    const Leg& leg = scenario.legs[i];
    if (!leg.delay.has_samples() || !leg.service.has_samples()) {
      throw Error(ErrorKind::MissingSamples, "leg needs delay and service samples", i);
    }
  }
}

bool indicator_phi(std::span<const double> x, std::span<const double> y,
                   const CirculationPlan& plan) {
  const std::size_t k = plan.legs();
  if (x.size() != k || y.size() != k) {
    throw Error(ErrorKind::LengthMismatch, "expected vectors of length " + std::to_string(k));
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (x[i] + y[i] > plan.intervals[i]) return false;
  }
  return true;
}

double plan_reliability(std::span<const double> per_leg) {
  double product = 1.0;
  for (std::size_t i = 0; i < per_leg.size(); ++i) {
    const double p = per_leg[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::OutOfRangeProbability, std::to_string(p) + " is not in [0, 1]", i);
    }
    product *= p;
  }
  return product;
}

}  // namespace circrel
