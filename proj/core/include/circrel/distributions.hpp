#pragma once

// Delay/service laws and the per-leg success probability
//   R(t) = P{X + Y <= t} = \int F(t - x) dG(x)
// in closed form (exponential legs), by quadrature, and by plug-in sums over
// observed samples.

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "circrel/plan_model.hpp"
#include "circrel/quadrature.hpp"

namespace circrel {

struct ExponentialLaw {
  double rate = 1.0;
};

/// Empirical law of a sample. Values are kept sorted ascending; the CDF is
/// the right-continuous step function P{V <= u}.
class EmpiricalLaw {
 public:
  explicit EmpiricalLaw(std::vector<double> values);

  std::span<const double> sorted_values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double cdf(double u) const noexcept;

 private:
  std::vector<double> values_;
};

using DistributionModel = std::variant<ExponentialLaw, EmpiricalLaw>;

double cdf(const DistributionModel& model, double u);

/// Law of one side of a leg, preferring the exponential rate when present
/// unless `prefer_samples` is set.
DistributionModel side_law(const SideModel& side, bool prefer_samples = false);

/// Closed-form hypoexponential CDF. Near lambda == mu (relative gap below
/// kSingularTube) the Erlang-2 limit is used, so the result is continuous
/// across the singular line.
double leg_reliability_exponential(const ExponentialLegModel& leg, double t);

/// \int_0^t F(t - x)^power dG(x). Exponential G is integrated adaptively on
/// [0, t]; empirical G reduces to the exact average over its atoms.
double integrate_cdf_power(const DistributionModel& inner, const DistributionModel& measure,
                           double t, int power, const QuadratureOptions& options = {});

double leg_reliability_quadrature(const DistributionModel& delay, const DistributionModel& service,
                                  double t, const QuadratureOptions& options = {});

/// Fraction of (delay, service) cross-pairs with delay + service <= t.
double leg_reliability_plugin(const LegSamples& samples, double t);

/// Relative width of the tube around singular rate lines.
inline constexpr double kSingularTube = 1e-6;

/// True when |a - b| <= kSingularTube * max(|a|, |b|).
bool within_singular_tube(double a, double b) noexcept;

}  // namespace circrel
