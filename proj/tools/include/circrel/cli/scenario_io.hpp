#pragma once

// Scenario files.
//
// JSON:
//   { "label": "...", "time_unit": "min", "intervals": [t_1, ..., t_k],
//     "legs": [ { "delay":   {"exponential": {"rate": 0.05}, "sample_size": 20},
//                 "service": {"samples": [3.1, 7.4, ...]} }, ... ] }
//
// Each side may carry "exponential", "samples", or both, plus an optional
// "sample_size". Samples can also come from a CSV with header
// `leg,kind,value` (1-based leg, kind delay|service); CSV values are
// appended to the matching side.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "circrel/plan_model.hpp"

namespace circrel::cli {

/// Parses without validating.
Scenario parse_scenario_json(std::string_view text);

/// Appends CSV samples to the scenario's legs. Throws ParseError with the
/// line number, UnknownKind for a bad kind, InvalidSample for a negative
/// value and IndexOutOfRange for a leg outside the plan.
void attach_samples_csv(Scenario& scenario, std::istream& csv);

/// Reads, merges and validates.
Scenario load_scenario(const std::filesystem::path& scenario_path,
                       const std::optional<std::filesystem::path>& samples_csv = std::nullopt);

}  // namespace circrel::cli
