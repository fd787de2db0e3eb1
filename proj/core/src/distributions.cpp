#include "circrel/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "circrel/error.hpp"

namespace circrel {
namespace {

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::NegativeTime, "t = " + std::to_string(t));
  }
}

// (1 - exp(-d t)) / d. With `series` (or tiny d t) the Taylor expansion about
// d = 0 is used, whose leading term t gives the Erlang-2 limit.
double expm1_ratio(double d, double t, bool series) {
  const double z = d * t;
  if (series || std::abs(z) < 1e-8) return t * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0);
  return -std::expm1(-z) / d;
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

EmpiricalLaw::EmpiricalLaw(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::EmptySample, "empirical law needs one value");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidSample, "non-finite sample value");
  }
  std::sort(values_.begin(), values_.end());
}

double EmpiricalLaw::cdf(double u) const noexcept {
  const auto it = std::upper_bound(values_.begin(), values_.end(), u);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double cdf(const DistributionModel& model, double u) {
  if (const auto* e = std::get_if<ExponentialLaw>(&model)) {
    return u <= 0.0 ? 0.0 : -std::expm1(-e->rate * u);
  }
  return std::get<EmpiricalLaw>(model).cdf(u);
}

DistributionModel side_law(const SideModel& side, bool prefer_samples) {
  if (side.has_samples() && (prefer_samples || !side.rate)) return EmpiricalLaw(side.samples);
  if (side.rate) return ExponentialLaw{*side.rate};
  throw Error(ErrorKind::MissingModel, "side has neither a rate nor samples");
}

bool within_singular_tube(double a, double b) noexcept {
  return std::abs(a - b) <= kSingularTube * std::max(std::abs(a), std::abs(b));
}

double leg_reliability_exponential(const ExponentialLegModel& leg, double t) {
  require_nonnegative_time(t);
  const double lambda = leg.delay_rate;
  const double mu = leg.service_rate;
  if (!(lambda > 0.0) || !(mu > 0.0)) throw Error(ErrorKind::NonpositiveRate, "rates must be > 0");
  if (t == 0.0) return 0.0;
  // 1 - (lambda e^{-mu t} - mu e^{-lambda t}) / (lambda - mu), rearranged as
  // 1 - e^{-mu t} (1 + mu (1 - e^{-(lambda - mu) t}) / (lambda - mu)).
  // Inside the tube the ratio is expanded about lambda = mu, so the value
  // tends to the Erlang-2 CDF 1 - (1 + mu t) e^{-mu t} without a jump.
  const double d = lambda - mu;
  const double tail =
      std::exp(-mu * t) * (1.0 + mu * expm1_ratio(d, t, within_singular_tube(lambda, mu)));
  return clamp_probability(1.0 - tail);
}

double integrate_cdf_power(const DistributionModel& inner, const DistributionModel& measure,
                           double t, int power, const QuadratureOptions& options) {
  require_nonnegative_time(t);
  auto term = [&](double x) {
    const double c = cdf(inner, t - x);
    return power == 1 ? c : std::pow(c, power);
  };

  if (const auto* atoms = std::get_if<EmpiricalLaw>(&measure)) {
    double sum = 0.0;
    for (double x : atoms->sorted_values()) sum += term(x);
    return sum / static_cast<double>(atoms->size());
  }

  const double rate = std::get<ExponentialLaw>(measure).rate;
  if (t == 0.0) return 0.0;
  std::vector<double> breaks;
  if (const auto* steps = std::get_if<EmpiricalLaw>(&inner)) {
    for (double v : steps->sorted_values()) breaks.push_back(t - v);
  }
  auto integrand = [&](double x) { return term(x) * rate * std::exp(-rate * x); };
  const QuadratureResult q = adaptive_integrate(integrand, 0.0, t, breaks, options);
  return clamp_probability(q.value);
}

double leg_reliability_quadrature(const DistributionModel& delay, const DistributionModel& service,
                                  double t, const QuadratureOptions& options) {
  return integrate_cdf_power(delay, service, t, 1, options);
}

double leg_reliability_plugin(const LegSamples& samples, double t) {
  require_nonnegative_time(t);
  if (samples.delays.empty() || samples.services.empty()) {
    throw Error(ErrorKind::EmptySample, "plug-in reliability needs both samples");
  }
  std::vector<double> services = samples.services;
  std::sort(services.begin(), services.end());
  std::size_t hits = 0;
  for (double x : samples.delays) {
    const auto end = std::partition_point(services.begin(), services.end(),
                                          [&](double y) { return x + y <= t; });
    hits += static_cast<std::size_t>(end - services.begin());
  }
  return static_cast<double>(hits) /
         static_cast<double>(samples.delays.size() * samples.services.size());
}

}  // namespace circrel
