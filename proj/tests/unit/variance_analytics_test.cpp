#include "circrel/variance_analytics.hpp"

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "circrel/distributions.hpp"
#include "circrel/error.hpp"
#include "circrel/random_stream.hpp"
#include "test_support.hpp"

namespace circrel {
namespace {

using testing::exp_kernel_reference;
using testing::exponential_scenario;
using testing::samples_scenario;

// scipy.integrate.quad (epsrel 1e-12), delay rate 0.05, service rate 0.02, t = 140.
constexpr double kInIn = 0.8992578169350064;
constexpr double kOutOut = 0.8086646213187134;
constexpr double kOutIn = 0.8745280042693555;
constexpr double kInOut = 0.8133574245902094;

const Leg kTurnaroundLeg = Leg::from_exponential({0.05, 0.02}, 20);

TEST(OmegaProbability, Examples) {
  const std::vector<std::size_t> ones(4, 1);
  EXPECT_EQ(omega_probability(LegSubset::full(4), ones), 1.0);
  EXPECT_EQ(omega_probability(LegSubset{}, ones), 0.0);
  const std::vector<std::size_t> twenty(3, 20);
  EXPECT_NEAR(omega_probability(LegSubset::of({0, 2}), twenty), 0.002375, 1e-15);
}

TEST(OmegaProbability, MatchesCollisionPatternFrequency) {
  // Monte Carlo oracle: draw two index vectors and tally which legs coincide.
  const std::vector<std::size_t> sizes{4, 2, 5};
  std::map<std::uint64_t, int> counts;
  const int trials = 400000;
  RandomStream s(31, 0);
  for (int i = 0; i < trials; ++i) {
    std::uint64_t mask = 0;
    for (std::size_t leg = 0; leg < sizes.size(); ++leg) {
      if (s.uniform_index(sizes[leg]) == s.uniform_index(sizes[leg])) mask |= 1u << leg;
    }
    ++counts[mask];
  }
  for (std::uint64_t m = 0; m < 8; ++m) {
    const double p = omega_probability(LegSubset(m), sizes);
    const double se = std::sqrt(p * (1 - p) / trials);
    EXPECT_NEAR(static_cast<double>(counts[m]) / trials, p, 4 * se + 1e-12) << m;
  }
}

TEST(OmegaProbability, SumsToOne) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<std::size_t> n(1, 30);
  for (std::size_t k = 1; k <= 10; ++k) {
    std::vector<std::size_t> sizes(k);
    for (auto& v : sizes) v = n(gen);
    double total = 0.0;
    for (std::uint64_t m = 0; m < (1u << k); ++m) total += omega_probability(LegSubset(m), sizes);
    EXPECT_NEAR(total, 1.0, 1e-12) << k;
  }
}

TEST(OmegaProbability, IndexOutOfRange) {
  const std::vector<std::size_t> sizes{3, 3};
  EXPECT_THROW(omega_probability(LegSubset::of({2}), sizes), Error);
}

TEST(PairProbability, Examples) {
  const std::vector<std::size_t> ones(3, 1);
  EXPECT_EQ(pair_probability({LegSubset::full(3), LegSubset::full(3)}, ones, ones), 1.0);
  const std::vector<std::size_t> some_one{1, 4};
  EXPECT_EQ(pair_probability({LegSubset{}, LegSubset::full(2)}, some_one, some_one), 0.0);
  const std::vector<std::size_t> twenty{20};
  EXPECT_NEAR(pair_probability({LegSubset::of({0}), LegSubset{}}, twenty, twenty), 0.0475, 1e-15);
}

TEST(LegCaseMapping, Membership) {
  const OmegaPair pair{LegSubset::of({0, 1}), LegSubset::of({1, 2})};
  EXPECT_EQ(leg_case(pair, 0), LegCase::in_out);
  EXPECT_EQ(leg_case(pair, 1), LegCase::in_in);
  EXPECT_EQ(leg_case(pair, 2), LegCase::out_in);
  EXPECT_EQ(leg_case(pair, 3), LegCase::out_out);
}

TEST(HFactor, ZeroSlack) {
  for (auto c : {LegCase::in_in, LegCase::out_out, LegCase::out_in, LegCase::in_out}) {
    for (auto mode : {KernelMode::closed_form, KernelMode::quadrature}) {
      EXPECT_EQ(h_factor(c, kTurnaroundLeg, 0.0, mode).value, 0.0);
    }
  }
}

TEST(HFactor, ReferenceValuesAtT140) {
  // Live re-check of the frozen constants with a Simpson rule.
  EXPECT_NEAR(exp_kernel_reference(0.05, 0.02, 140, 2), kOutIn, 1e-10);
  EXPECT_NEAR(exp_kernel_reference(0.02, 0.05, 140, 2), kInOut, 1e-10);

  for (auto mode : {KernelMode::closed_form, KernelMode::quadrature}) {
    EXPECT_NEAR(h_factor(LegCase::in_in, kTurnaroundLeg, 140, mode).value, kInIn, 1e-9);
    EXPECT_NEAR(h_factor(LegCase::out_out, kTurnaroundLeg, 140, mode).value, kOutOut, 1e-9);
    EXPECT_NEAR(h_factor(LegCase::out_in, kTurnaroundLeg, 140, mode).value, kOutIn, 1e-9);
    EXPECT_NEAR(h_factor(LegCase::in_out, kTurnaroundLeg, 140, mode).value, kInOut, 1e-9);
  }
  EXPECT_NEAR(kInIn, 0.8992578, 5e-8);
  EXPECT_NEAR(kOutOut, 0.808665, 5e-7);
  EXPECT_NEAR(kOutIn, 0.874528, 5e-7);
  EXPECT_NEAR(kInOut, 0.813357, 5e-7);
}

TEST(HFactor, OrderingProperty) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> rate(0.005, 0.5), slack(0.0, 400.0);
  for (int i = 0; i < 300; ++i) {
    const Leg leg = Leg::from_exponential({rate(gen), rate(gen)});
    const LegKernels k = leg_kernels(leg, slack(gen), KernelMode::closed_form);
    EXPECT_LE(k.out_out, k.out_in + 1e-15);
    EXPECT_LE(k.out_out, k.in_out + 1e-15);
    EXPECT_LE(k.out_in, k.in_in + 1e-15);
    EXPECT_LE(k.in_out, k.in_in + 1e-15);
  }
}

TEST(HFactor, ClosedFormMatchesQuadratureOffTubes) {
  for (double lambda : {0.01, 0.03, 0.05, 0.12, 0.4}) {
    for (double mu : {0.015, 0.02, 0.07, 0.1, 0.25}) {
      const Leg leg = Leg::from_exponential({lambda, mu});
      for (double t : {1.0, 30.0, 140.0, 333.0, 700.0}) {
        for (auto c : {LegCase::in_in, LegCase::out_out, LegCase::out_in, LegCase::in_out}) {
          const HFactor closed = h_factor(c, leg, t, KernelMode::closed_form);
          if (closed.near_singular_fallback) continue;
          EXPECT_NEAR(closed.value, h_factor(c, leg, t, KernelMode::quadrature).value, 1e-8)
              << lambda << " " << mu << " " << t << " " << to_string(c);
        }
      }
    }
  }
}

TEST(HFactor, FallbackOnSingularLines) {
  EXPECT_TRUE(h_factor(LegCase::out_in, Leg::from_exponential({0.05, 0.1}), 100, KernelMode::closed_form)
                  .near_singular_fallback);
  EXPECT_TRUE(h_factor(LegCase::in_out, Leg::from_exponential({0.1, 0.05}), 100, KernelMode::closed_form)
                  .near_singular_fallback);
  EXPECT_TRUE(h_factor(LegCase::out_in, Leg::from_exponential({0.05, 0.05}), 100, KernelMode::closed_form)
                  .near_singular_fallback);
  EXPECT_FALSE(h_factor(LegCase::in_in, Leg::from_exponential({0.05, 0.05}), 100, KernelMode::closed_form)
                   .near_singular_fallback);
  // Fallback value matches a reference integral on the line itself.
  EXPECT_NEAR(h_factor(LegCase::out_in, Leg::from_exponential({0.05, 0.1}), 100, KernelMode::closed_form).value,
              exp_kernel_reference(0.05, 0.1, 100, 2), 1e-9);
}

TEST(HFactor, ModeRequirements) {
  const Leg samples_only = Leg::from_samples({{1, 2}, {3}});
  EXPECT_THROW(h_factor(LegCase::in_in, samples_only, 5, KernelMode::closed_form), Error);
  EXPECT_THROW(h_factor(LegCase::in_in, kTurnaroundLeg, 5, KernelMode::plugin), Error);
  EXPECT_THROW(h_factor(LegCase::in_in, kTurnaroundLeg, -1, KernelMode::closed_form), Error);
}

TEST(HFactor, PluginSquaredSums) {
  // delays {1,3}, services {1,3}, t = 4: F(4-1)=1, F(4-3)=0.5.
  const Leg leg = Leg::from_samples({{1, 3}, {1, 3}});
  EXPECT_EQ(h_factor(LegCase::in_in, leg, 4, KernelMode::plugin).value, 0.75);
  EXPECT_EQ(h_factor(LegCase::out_out, leg, 4, KernelMode::plugin).value, 0.5625);
  EXPECT_EQ(h_factor(LegCase::out_in, leg, 4, KernelMode::plugin).value, 0.625);
  EXPECT_EQ(h_factor(LegCase::in_out, leg, 4, KernelMode::plugin).value, 0.625);
}

TEST(ConditionalMixedMoment, Extremes) {
  const Scenario s = exponential_scenario(3, 0.05, 0.02, 20, 140);
  const double theta = std::pow(kInIn, 3);
  EXPECT_NEAR(conditional_mixed_moment({LegSubset::full(3), LegSubset::full(3)}, s, KernelMode::closed_form),
              theta, 1e-14);
  EXPECT_NEAR(conditional_mixed_moment({LegSubset{}, LegSubset{}}, s, KernelMode::closed_form), theta * theta,
              1e-14);
}

TEST(ConditionalMixedMoment, MixedPairIsProductOfTabulatedValues) {
  const Scenario s = exponential_scenario(2, 0.05, 0.02, 20, 140);
  // leg 1: delay shared only -> (in,out); leg 2: service shared only -> (out,in)
  const OmegaPair pair{LegSubset::of({0}), LegSubset::of({1})};
  EXPECT_NEAR(conditional_mixed_moment(pair, s, KernelMode::closed_form), kInOut * kOutIn, 1e-14);
  EXPECT_NEAR(conditional_mixed_moment(pair, s, KernelMode::quadrature), kInOut * kOutIn, 1e-9);
}

TEST(MixedMoment, SizeOneMeansTheta) {
  const Scenario s = exponential_scenario(3, 0.05, 0.02, 1, 140);
  const double theta = std::pow(kInIn, 3);
  for (auto method : {Mu11Method::factorized, Mu11Method::enumerate}) {
    EXPECT_NEAR(mixed_moment_mu11(s, KernelMode::closed_form, method), theta, 1e-14);
  }
}

TEST(MixedMoment, TurnaroundExampleAtT140) {
  const Scenario s = exponential_scenario(5, 0.05, 0.02, 20, 140);
  const double factorized = mixed_moment_mu11(s, KernelMode::closed_form, Mu11Method::factorized);
  const double enumerated = mixed_moment_mu11(s, KernelMode::quadrature, Mu11Method::enumerate);
  EXPECT_NEAR(factorized, enumerated, 1e-9);
  // Reference from the Python cross-check: 0.3535319033097205.
  EXPECT_NEAR(factorized, 0.3535319033097205, 1e-12);
  EXPECT_NEAR(factorized, 0.353525, 1e-5);
}

TEST(MixedMoment, EnumerateEqualsFactorizedRandom) {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> n(1, 6), k_dist(1, 3);
  std::uniform_real_distribution<double> rate(0.01, 0.3), slack(0, 200);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = k_dist(gen);
    std::vector<LegKernels> kernels;
    std::vector<std::size_t> nx, ny;
    for (std::size_t i = 0; i < k; ++i) {
      kernels.push_back(leg_kernels(Leg::from_exponential({rate(gen), rate(gen)}), slack(gen),
                                    KernelMode::closed_form));
      nx.push_back(n(gen));
      ny.push_back(n(gen));
    }
    EXPECT_NEAR(mixed_moment_mu11(kernels, nx, ny, Mu11Method::enumerate),
                mixed_moment_mu11(kernels, nx, ny, Mu11Method::factorized), 1e-12);
  }
}

TEST(MixedMoment, EnumerationLimit) {
  const Scenario s = exponential_scenario(13, 0.05, 0.02, 20, 140);
  try {
    mixed_moment_mu11(s, KernelMode::closed_form, Mu11Method::enumerate);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EnumerationTooLarge);
  }
  EXPECT_NO_THROW(mixed_moment_mu11(s, KernelMode::closed_form, Mu11Method::factorized));
}

TEST(MixedMoment, MissingSampleSize) {
  Scenario s = exponential_scenario(2, 0.05, 0.02, 20, 140);
  s.legs[1].service.sample_size.reset();
  try {
    mixed_moment_mu11(s, KernelMode::closed_form, Mu11Method::factorized);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingModel);
    EXPECT_EQ(e.leg(), 1u);
  }
}

TEST(EstimatorVariance, Examples) {
  EXPECT_DOUBLE_EQ(estimator_variance(0.5, 0.9, 1).variance, 0.25);
  const double theta = 0.3;
  EXPECT_NEAR(estimator_variance(theta, theta * theta, 7).variance, (theta - theta * theta) / 7, 1e-15);
  EXPECT_NEAR(estimator_variance(0.588058, 0.353525, 50).variance, 0.0124, 5e-5);
}

TEST(EstimatorVariance, MomentsAndClamp) {
  const auto r = estimator_variance(0.4, 0.2, 10);
  EXPECT_EQ(r.moments.mu, 0.4);
  EXPECT_EQ(r.moments.mu2, 0.4);
  EXPECT_EQ(r.moments.mu11, 0.2);
  // theta^2 - 1e-14 is a rounding-level negative: clamped to 0 for r -> large.
  EXPECT_EQ(estimator_variance(1.0, 1.0 - 1e-14, 1000000).variance, 0.0);
  EXPECT_THROW(estimator_variance(0.5, 0.1, 10), Error);  // mu11 < theta^2 by far
  EXPECT_THROW(estimator_variance(1.5, 0.1, 10), Error);
  EXPECT_THROW(estimator_variance(0.5, 0.3, 0), Error);
}

TEST(VariancePipeline, TurnaroundEndpoints) {
  const auto low = variance_pipeline(exponential_scenario(5, 0.05, 0.02, 20, 20), 50, KernelMode::closed_form);
  EXPECT_NEAR(low.variance, 6.9e-7, 0.1 * 6.9e-7);
  const auto high = variance_pipeline(exponential_scenario(5, 0.05, 0.02, 20, 300), 50, KernelMode::closed_form);
  EXPECT_NEAR(high.variance, 0.0011, 0.00011);
  EXPECT_EQ(high.per_leg.size(), 5u);
  EXPECT_FALSE(high.near_singular_fallback);
}

TEST(VariancePipeline, ModesAgreeForExponentialLegs) {
  const Scenario s = exponential_scenario(3, 0.05, 0.02, 20, 140);
  const auto closed = variance_pipeline(s, 50, KernelMode::closed_form);
  const auto quad = variance_pipeline(s, 50, KernelMode::quadrature, Mu11Method::enumerate);
  EXPECT_NEAR(closed.variance, quad.variance, 1e-9);
  EXPECT_NEAR(closed.theta, quad.theta, 1e-9);
}

TEST(VariancePipeline, VanishesAsSamplesAndResamplesGrow) {
  double previous = 1.0;
  for (std::size_t n : {5, 20, 100, 1000, 100000, 1000000}) {
    const double v = variance_pipeline(exponential_scenario(5, 0.05, 0.02, n, 140), 1000000,
                                       KernelMode::closed_form).variance;
    EXPECT_LT(v, previous) << n;
    previous = v;
  }
  EXPECT_LT(previous, 1e-6);
  previous = 1.0;
  for (std::size_t r : {1, 10, 100, 10000, 1000000}) {
    const double v = variance_pipeline(exponential_scenario(5, 0.05, 0.02, 1000000, 140), r,
                                       KernelMode::closed_form).variance;
    EXPECT_LT(v, previous) << r;
    previous = v;
  }
  EXPECT_LT(previous, 1e-6);
}

TEST(VariancePipeline, RangeInvariantsOnRandomConfigs) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> rate(0.005, 0.4), slack(0, 500);
  std::uniform_int_distribution<std::size_t> n(1, 50), r(1, 200), k(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    Scenario s;
    const std::size_t legs = k(gen);
    for (std::size_t i = 0; i < legs; ++i) {
      s.plan.intervals.push_back(slack(gen));
      Leg leg = Leg::from_exponential({rate(gen), rate(gen)});
      leg.delay.sample_size = n(gen);
      leg.service.sample_size = n(gen);
      s.legs.push_back(leg);
    }
    const auto v = variance_pipeline(validate_scenario(s), r(gen), KernelMode::closed_form);
    EXPECT_GE(v.theta, 0.0);
    EXPECT_LE(v.theta, 1.0);
    EXPECT_GE(v.variance, 0.0);
    EXPECT_LE(v.theta * v.theta, v.moments.mu11 + 1e-15);
    EXPECT_LE(v.moments.mu11, v.theta + 1e-15);
  }
}

}  // namespace
}  // namespace circrel
