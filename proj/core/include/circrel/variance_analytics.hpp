#pragma once

// Exact variance of the resampling estimator.
//
// Two realizations l != l' share a drawn element on leg i with probability
// 1/n_i, separately for the delay and the service sample. The pattern of
// coincidences is an OmegaPair; conditional on it the two success indicators
// factor over legs into one of four kernels h_i:
//
//   (in,  in ) : R_i(t)                      same delay, same service
//   (out, out) : R_i(t)^2                    nothing shared
//   (out, in ) : \int F_i(t - x)^2 dG_i(x)   same service only
//   (in,  out) : \int G_i(t - x)^2 dF_i(x)   same delay only
//
// mu11 averages the product of kernels over all patterns, and
//   Var = theta / r + (r - 1) / r * mu11 - theta^2.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "circrel/plan_model.hpp"
#include "circrel/quadrature.hpp"

namespace circrel {

/// Subset of 0-based leg indices (k <= 64).
class LegSubset {
 public:
  constexpr LegSubset() = default;
  constexpr explicit LegSubset(std::uint64_t mask) : mask_(mask) {}

  static LegSubset of(std::initializer_list<std::size_t> legs);
  static LegSubset full(std::size_t k);

  constexpr bool contains(std::size_t i) const noexcept { return i < 64 && ((mask_ >> i) & 1u); }
  constexpr std::uint64_t mask() const noexcept { return mask_; }

  friend constexpr bool operator==(LegSubset, LegSubset) = default;

 private:
  std::uint64_t mask_ = 0;
};

/// Legs whose delay indices coincide and legs whose service indices coincide.
struct OmegaPair {
  LegSubset delay;
  LegSubset service;
};

enum class LegCase { in_in, out_out, out_in, in_out };

LegCase leg_case(const OmegaPair& pair, std::size_t leg) noexcept;

enum class KernelMode { closed_form, quadrature, plugin, automatic };
enum class Mu11Method { factorized, enumerate };

std::string_view to_string(KernelMode mode) noexcept;
std::string_view to_string(Mu11Method method) noexcept;
std::string_view to_string(LegCase c) noexcept;

struct HFactor {
  double value = 0.0;
  /// Set when a closed-form kernel sat inside a singular tube and was
  /// evaluated by quadrature instead. Informational.
  bool near_singular_fallback = false;
};

/// The four kernels of one leg at its slack.
struct LegKernels {
  double in_in = 0.0;
  double out_out = 0.0;
  double out_in = 0.0;
  double in_out = 0.0;
  KernelMode mode = KernelMode::closed_form;
  bool near_singular_fallback = false;

  double value(LegCase c) const noexcept;
};

HFactor h_factor(LegCase c, const Leg& leg, double t, KernelMode mode,
                 const QuadratureOptions& options = {});

LegKernels leg_kernels(const Leg& leg, double t, KernelMode mode);

std::vector<LegKernels> scenario_kernels(const Scenario& scenario, KernelMode mode);

/// n_i^X and n_i^Y per leg as seen by the coincidence probabilities.
struct SampleSizes {
  std::vector<std::size_t> delay;
  std::vector<std::size_t> service;
};

/// Throws MissingModel when a side has no sample count.
SampleSizes scenario_sizes(const Scenario& scenario);

/// P(omega) = prod_{i in omega} 1/n_i * prod_{i not in omega} (1 - 1/n_i).
double omega_probability(LegSubset omega, std::span<const std::size_t> sizes);

double pair_probability(const OmegaPair& pair, std::span<const std::size_t> sizes_x,
                        std::span<const std::size_t> sizes_y);

double conditional_mixed_moment(const OmegaPair& pair, std::span<const LegKernels> kernels);
double conditional_mixed_moment(const OmegaPair& pair, const Scenario& scenario, KernelMode mode);

inline constexpr std::size_t kMaxEnumerationLegs = 12;

/// enumerate: literal sum over all 2^k x 2^k pairs, ascending bitmasks.
/// factorized: per-leg regrouping of the same sum, O(k).
double mixed_moment_mu11(std::span<const LegKernels> kernels, std::span<const std::size_t> sizes_x,
                         std::span<const std::size_t> sizes_y, Mu11Method method);
double mixed_moment_mu11(const Scenario& scenario, KernelMode mode, Mu11Method method);

struct MomentSet {
  double mu = 0.0;
  double mu2 = 0.0;
  double mu11 = 0.0;
};

struct VarianceReport {
  double theta = 0.0;
  MomentSet moments;
  std::size_t resamples = 0;
  double variance = 0.0;
  KernelMode kernel_mode = KernelMode::closed_form;
  Mu11Method method = Mu11Method::factorized;
  std::vector<LegKernels> per_leg;
  bool near_singular_fallback = false;

  double mu11() const noexcept { return moments.mu11; }
};

/// Rounding-level negatives (>= -kVarianceClampTolerance) clamp to 0.
inline constexpr double kVarianceClampTolerance = 1e-12;

VarianceReport estimator_variance(double theta, double mu11, std::size_t resamples);

VarianceReport variance_pipeline(const Scenario& scenario, std::size_t resamples, KernelMode mode,
                                 Mu11Method method = Mu11Method::factorized);

}  // namespace circrel
