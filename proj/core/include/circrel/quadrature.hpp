#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace circrel {

struct QuadratureOptions {
  double relative_tolerance = 1e-9;
  std::size_t max_evaluations = 1'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// `breakpoints` inside (a, b) split the domain so that jump
/// discontinuities never fall inside a panel. Throws
/// QuadratureNonConvergence when the evaluation budget runs out or the
/// achieved error exceeds the tolerance; the message reports both.
QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints = {},
                                    const QuadratureOptions& options = {});

}  // namespace circrel
