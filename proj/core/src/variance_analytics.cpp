#include "circrel/variance_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "circrel/distributions.hpp"
#include "circrel/error.hpp"

namespace circrel {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// \int F(t - y)^2 dG(y) for F ~ Exp(a), G ~ Exp(b):
//   1 - [2a^2 e^{-bt} - 2b(2a - b) e^{-at} + b(a - b) e^{-2at}] / [(a - b)(2a - b)].
// Singular on a = b and b = 2a.
double squared_cdf_closed_form(double a, double b, double t) {
  const double num = 2.0 * a * a * std::exp(-b * t) - 2.0 * b * (2.0 * a - b) * std::exp(-a * t) +
                     b * (a - b) * std::exp(-2.0 * a * t);
  return clamp01(1.0 - num / ((a - b) * (2.0 * a - b)));
}

bool squared_cdf_singular(double a, double b) {
  return within_singular_tube(a, b) || within_singular_tube(2.0 * a, b);
}

// Number of values v in the sorted sample with v + shift <= t, using the same
// comparison as the success indicator.
std::size_t count_fitting(std::span<const double> sorted, double shift, double t) {
  const auto end =
      std::partition_point(sorted.begin(), sorted.end(), [&](double v) { return shift + v <= t; });
  return static_cast<std::size_t>(end - sorted.begin());
}

// Average over `outer` of (fraction of `inner` fitting together with it)^2.
double plugin_squared(std::span<const double> inner_sorted, std::span<const double> outer,
                      double t) {
  const double n = static_cast<double>(inner_sorted.size());
  double sum = 0.0;
  for (double o : outer) {
    const double frac = static_cast<double>(count_fitting(inner_sorted, o, t)) / n;
    sum += frac * frac;
  }
  return sum / static_cast<double>(outer.size());
}

KernelMode resolve_mode(const Leg& leg, KernelMode mode) {
  if (mode != KernelMode::automatic) return mode;
  if (leg.exponential()) return KernelMode::closed_form;
  if (leg.samples()) return KernelMode::plugin;
  return KernelMode::quadrature;
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::NegativeTime, std::to_string(t));
}

HFactor closed_form_h(LegCase c, const ExponentialLegModel& m, double t,
                      const QuadratureOptions& options) {
  const double lambda = m.delay_rate;
  const double mu = m.service_rate;
  switch (c) {
    case LegCase::in_in:
      return {leg_reliability_exponential(m, t), false};
    case LegCase::out_out: {
      const double r = leg_reliability_exponential(m, t);
      return {r * r, false};
    }
    case LegCase::out_in:
      if (squared_cdf_singular(lambda, mu)) {
        return {integrate_cdf_power(ExponentialLaw{lambda}, ExponentialLaw{mu}, t, 2, options),
                true};
      }
      return {squared_cdf_closed_form(lambda, mu, t), false};
    case LegCase::in_out:
      if (squared_cdf_singular(mu, lambda)) {
        return {integrate_cdf_power(ExponentialLaw{mu}, ExponentialLaw{lambda}, t, 2, options),
                true};
      }
      return {squared_cdf_closed_form(mu, lambda, t), false};
  }
  return {};
}

HFactor quadrature_h(LegCase c, const Leg& leg, double t, const QuadratureOptions& options) {
  const DistributionModel f = side_law(leg.delay);
  const DistributionModel g = side_law(leg.service);
  switch (c) {
    case LegCase::in_in:
      return {integrate_cdf_power(f, g, t, 1, options), false};
    case LegCase::out_out: {
      const double r = integrate_cdf_power(f, g, t, 1, options);
      return {r * r, false};
    }
    case LegCase::out_in:
      return {integrate_cdf_power(f, g, t, 2, options), false};
    case LegCase::in_out:
      return {integrate_cdf_power(g, f, t, 2, options), false};
  }
  return {};
}

HFactor plugin_h(LegCase c, const LegSamples& s, double t) {
  std::vector<double> delays = s.delays;
  std::vector<double> services = s.services;
  std::sort(delays.begin(), delays.end());
  std::sort(services.begin(), services.end());
  switch (c) {
    case LegCase::in_in:
      return {leg_reliability_plugin(s, t), false};
    case LegCase::out_out: {
      const double r = leg_reliability_plugin(s, t);
      return {r * r, false};
    }
    case LegCase::out_in:
      return {plugin_squared(delays, services, t), false};
    case LegCase::in_out:
      return {plugin_squared(services, delays, t), false};
  }
  return {};
}

}  // namespace

LegSubset LegSubset::of(std::initializer_list<std::size_t> legs) {
  std::uint64_t mask = 0;
  for (std::size_t i : legs) {
    if (i >= 64) throw Error(ErrorKind::IndexOutOfRange, "leg index " + std::to_string(i));
    mask |= std::uint64_t{1} << i;
  }
  return LegSubset(mask);
}

LegSubset LegSubset::full(std::size_t k) {
  if (k > 64) throw Error(ErrorKind::IndexOutOfRange, "at most 64 legs");
  return LegSubset(k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1);
}

LegCase leg_case(const OmegaPair& pair, std::size_t leg) noexcept {
  const bool d = pair.delay.contains(leg);
  const bool s = pair.service.contains(leg);
  if (d && s) return LegCase::in_in;
  if (!d && !s) return LegCase::out_out;
  return s ? LegCase::out_in : LegCase::in_out;
}

std::string_view to_string(KernelMode mode) noexcept {
  switch (mode) {
    case KernelMode::closed_form: return "closed_form";
    case KernelMode::quadrature: return "quadrature";
    case KernelMode::plugin: return "plugin";
    case KernelMode::automatic: return "auto";
  }
  return "?";
}

std::string_view to_string(Mu11Method method) noexcept {
  return method == Mu11Method::factorized ? "factorized" : "enumerate";
}

std::string_view to_string(LegCase c) noexcept {
  switch (c) {
    case LegCase::in_in: return "in_in";
    case LegCase::out_out: return "out_out";
    case LegCase::out_in: return "out_in";
    case LegCase::in_out: return "in_out";
  }
  return "?";
}

double LegKernels::value(LegCase c) const noexcept {
  switch (c) {
    case LegCase::in_in: return in_in;
    case LegCase::out_out: return out_out;
    case LegCase::out_in: return out_in;
    case LegCase::in_out: return in_out;
  }
  return 0.0;
}

HFactor h_factor(LegCase c, const Leg& leg, double t, KernelMode mode,
                 const QuadratureOptions& options) {
  require_time(t);
  switch (resolve_mode(leg, mode)) {
    case KernelMode::closed_form: {
      const auto m = leg.exponential();
      if (!m) throw Error(ErrorKind::MissingModel, "closed-form kernels need both rates");
      if (t == 0.0) return {0.0, false};
      return closed_form_h(c, *m, t, options);
    }
    case KernelMode::plugin: {
      const auto s = leg.samples();
      if (!s) throw Error(ErrorKind::MissingSamples, "plug-in kernels need both samples");
      return plugin_h(c, *s, t);
    }
    case KernelMode::quadrature:
    case KernelMode::automatic:
      break;
  }
  return quadrature_h(c, leg, t, options);
}

LegKernels leg_kernels(const Leg& leg, double t, KernelMode mode) {
  LegKernels k;
  k.mode = resolve_mode(leg, mode);
  auto take = [&](LegCase c, double& slot) {
    const HFactor h = h_factor(c, leg, t, k.mode);
    slot = h.value;
    k.near_singular_fallback = k.near_singular_fallback || h.near_singular_fallback;
  };
  take(LegCase::in_in, k.in_in);
  k.out_out = k.in_in * k.in_in;
  take(LegCase::out_in, k.out_in);
  take(LegCase::in_out, k.in_out);
  return k;
}

std::vector<LegKernels> scenario_kernels(const Scenario& scenario, KernelMode mode) {
  std::vector<LegKernels> out;
  out.reserve(scenario.k());
  for (std::size_t i = 0; i < scenario.k(); ++i) {
    try {
      out.push_back(leg_kernels(scenario.legs[i], scenario.plan.intervals[i], mode));
    } catch (const Error& e) {
      if (e.leg()) throw;
      throw Error(e.kind(), e.detail(), i);
    }
  }
  return out;
}

SampleSizes scenario_sizes(const Scenario& scenario) {
  SampleSizes sizes;
  for (std::size_t i = 0; i < scenario.k(); ++i) {
    const std::size_t nx = scenario.legs[i].delay.resample_size();
    const std::size_t ny = scenario.legs[i].service.resample_size();
    if (nx == 0 || ny == 0) {
      throw Error(ErrorKind::MissingModel, "sample size unknown (give samples or sample_size)", i);
    }
    sizes.delay.push_back(nx);
    sizes.service.push_back(ny);
  }
  return sizes;
}

double omega_probability(LegSubset omega, std::span<const std::size_t> sizes) {
  const std::size_t k = sizes.size();
  if (k < 64 && (omega.mask() >> k) != 0) {
    throw Error(ErrorKind::IndexOutOfRange, "subset references a leg beyond k = " + std::to_string(k));
  }
  double p = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (sizes[i] == 0) throw Error(ErrorKind::EmptySample, "sample size must be >= 1", i);
    const double coincide = 1.0 / static_cast<double>(sizes[i]);
    p *= omega.contains(i) ? coincide : 1.0 - coincide;
  }
  return p;
}

double pair_probability(const OmegaPair& pair, std::span<const std::size_t> sizes_x,
                        std::span<const std::size_t> sizes_y) {
  return omega_probability(pair.delay, sizes_x) * omega_probability(pair.service, sizes_y);
}

double conditional_mixed_moment(const OmegaPair& pair, std::span<const LegKernels> kernels) {
  double product = 1.0;
  for (std::size_t i = 0; i < kernels.size(); ++i) product *= kernels[i].value(leg_case(pair, i));
  return product;
}

double conditional_mixed_moment(const OmegaPair& pair, const Scenario& scenario, KernelMode mode) {
  const auto kernels = scenario_kernels(scenario, mode);
  return conditional_mixed_moment(pair, kernels);
}

double mixed_moment_mu11(std::span<const LegKernels> kernels, std::span<const std::size_t> sizes_x,
                         std::span<const std::size_t> sizes_y, Mu11Method method) {
  const std::size_t k = kernels.size();
  if (sizes_x.size() != k || sizes_y.size() != k) {
    throw Error(ErrorKind::LengthMismatch, "kernel and size vectors differ in length");
  }

  if (method == Mu11Method::factorized) {
    double product = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (sizes_x[i] == 0 || sizes_y[i] == 0) {
        throw Error(ErrorKind::EmptySample, "sample size must be >= 1", i);
      }
      const double px = 1.0 / static_cast<double>(sizes_x[i]);
      const double py = 1.0 / static_cast<double>(sizes_y[i]);
      const LegKernels& h = kernels[i];
      product *= px * py * h.in_in + (1.0 - px) * (1.0 - py) * h.out_out +
                 (1.0 - px) * py * h.out_in + px * (1.0 - py) * h.in_out;
    }
    return product;
  }

  if (k > kMaxEnumerationLegs) {
    throw Error(ErrorKind::EnumerationTooLarge,
                "enumeration limited to k <= " + std::to_string(kMaxEnumerationLegs));
  }
  const std::uint64_t subsets = std::uint64_t{1} << k;
  std::vector<double> p_delay(subsets), p_service(subsets);
  for (std::uint64_t m = 0; m < subsets; ++m) {
    p_delay[m] = omega_probability(LegSubset(m), sizes_x);
    p_service[m] = omega_probability(LegSubset(m), sizes_y);
  }
  double sum = 0.0;
  for (std::uint64_t m1 = 0; m1 < subsets; ++m1) {
    for (std::uint64_t m2 = 0; m2 < subsets; ++m2) {
      const OmegaPair pair{LegSubset(m1), LegSubset(m2)};
      sum += conditional_mixed_moment(pair, kernels) * p_delay[m1] * p_service[m2];
    }
  }
  return sum;
}

double mixed_moment_mu11(const Scenario& scenario, KernelMode mode, Mu11Method method) {
  const auto kernels = scenario_kernels(scenario, mode);
  const SampleSizes sizes = scenario_sizes(scenario);
  return mixed_moment_mu11(kernels, sizes.delay, sizes.service, method);
}

VarianceReport estimator_variance(double theta, double mu11, std::size_t resamples) {
  if (resamples == 0) throw Error(ErrorKind::InvalidArgument, "resamples must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::OutOfRangeProbability, "theta = " + std::to_string(theta));
  }
  if (!(mu11 >= 0.0 && mu11 <= 1.0)) {
    throw Error(ErrorKind::OutOfRangeProbability, "mu11 = " + std::to_string(mu11));
  }
  const double r = static_cast<double>(resamples);
  double variance = theta / r + (r - 1.0) / r * mu11 - theta * theta;
  if (variance < 0.0) {
    if (variance < -kVarianceClampTolerance) {
      throw Error(ErrorKind::NegativeVariance,
                  "variance " + std::to_string(variance) + " from theta = " +
                      std::to_string(theta) + ", mu11 = " + std::to_string(mu11));
    }
    variance = 0.0;
  }
  VarianceReport report;
  report.theta = theta;
  report.moments = MomentSet{theta, theta, mu11};
  report.resamples = resamples;
  report.variance = variance;
  return report;
}

VarianceReport variance_pipeline(const Scenario& scenario, std::size_t resamples, KernelMode mode,
                                 Mu11Method method) {
  auto kernels = scenario_kernels(scenario, mode);
  const SampleSizes sizes = scenario_sizes(scenario);

  std::vector<double> per_leg;
  per_leg.reserve(kernels.size());
  for (const LegKernels& k : kernels) per_leg.push_back(k.in_in);
  const double theta = plan_reliability(per_leg);
  const double mu11 = mixed_moment_mu11(kernels, sizes.delay, sizes.service, method);

  VarianceReport report = estimator_variance(theta, std::min(mu11, 1.0), resamples);
  report.kernel_mode = mode;
  report.method = method;
  report.near_singular_fallback =
      std::any_of(kernels.begin(), kernels.end(), [](const LegKernels& k) { return k.near_singular_fallback; });
  report.per_leg = std::move(kernels);
  return report;
}

}  // namespace circrel
