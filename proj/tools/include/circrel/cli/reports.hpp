#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circrel/resampler.hpp"
#include "circrel/variance_analytics.hpp"

namespace circrel::cli {

/// Shortest decimal that round-trips to the same double, '.' separator.
std::string format_number(double v);

std::string estimate_json(const EstimateReport& report);
std::string estimate_csv(const EstimateReport& report);
EstimateReport parse_estimate_json(std::string_view text);

std::string variance_json(const VarianceReport& report, std::span<const double> intervals);
std::string variance_csv(const VarianceReport& report);
VarianceReport parse_variance_json(std::string_view text);

struct SweepRow {
  double t = 0.0;
  double theta = 0.0;
  double mu11 = 0.0;
  double variance = 0.0;
};

/// Header `t,theta,mu11,variance`, one row per grid point.
std::string sweep_csv(std::span<const SweepRow> rows);
std::vector<SweepRow> parse_sweep_csv(std::istream& in);

}  // namespace circrel::cli
