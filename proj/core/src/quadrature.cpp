#include "circrel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "circrel/error.hpp"

namespace circrel {
namespace {

struct BudgetExceeded {};

constexpr unsigned kMaxDepth = 30;

}  // namespace

QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options) {
  QuadratureResult result;
  if (!(b > a)) return result;

  std::vector<double> edges{a};
  for (double p : breakpoints) {
    if (p > a && p < b) edges.push_back(p);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::size_t evaluations = 0;
  auto counted = [&](double x) {
    if (++evaluations > options.max_evaluations) throw BudgetExceeded{};
    return f(x);
  };

  // Panel tolerance is tighter than the contract so the summed error of many
  // panels still meets it.
  const double panel_tol = options.relative_tolerance * 0.1;
  double total_l1 = 0.0;
  try {
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      double err = 0.0;
      double l1 = 0.0;
      const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          counted, edges[p], edges[p + 1], kMaxDepth, panel_tol, &err, &l1);
      result.value += v;
      result.error_estimate += err;
      total_l1 += l1;
    }
  } catch (const BudgetExceeded&) {
    throw Error(ErrorKind::QuadratureNonConvergence,
                "evaluation budget of " + std::to_string(options.max_evaluations) +
                    " exhausted; partial error estimate " + std::to_string(result.error_estimate));
  }
  result.evaluations = evaluations;

  const double scale = std::max(total_l1, std::abs(result.value));
  if (result.error_estimate > options.relative_tolerance * scale &&
      result.error_estimate > 1e-300) {
    throw Error(ErrorKind::QuadratureNonConvergence,
                "achieved error " + std::to_string(result.error_estimate) + " exceeds tolerance " +
                    std::to_string(options.relative_tolerance * scale));
  }
  return result;
}

}  // namespace circrel
