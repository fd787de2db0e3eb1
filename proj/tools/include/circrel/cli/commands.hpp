#pragma once

// Subcommands of the `circrel` tool. Each writes its report to `out`,
// diagnostics to `err`, and returns the process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circrel/cli/reports.hpp"
#include "circrel/error.hpp"
#include "circrel/plan_model.hpp"
#include "circrel/variance_analytics.hpp"

namespace circrel::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitInput = 2,
  kExitMissingData = 3,
  kExitNumeric = 4,
};

int exit_code_for(const Error& e) noexcept;

inline constexpr std::uint64_t kDefaultSeed = 42;

/// CIRCREL_SEED when set and parseable, else kDefaultSeed.
std::uint64_t default_seed();

enum class OutputFormat { json, csv };

struct ScenarioInput {
  std::filesystem::path scenario;
  std::optional<std::filesystem::path> samples;
  /// Applied to every side without its own sample_size.
  std::optional<std::size_t> sample_size;
};

struct EstimateOptions {
  ScenarioInput input;
  std::size_t resamples = 1;
  std::uint64_t seed = kDefaultSeed;
  OutputFormat format = OutputFormat::json;
  unsigned threads = 1;
};

struct VarianceOptions {
  ScenarioInput input;
  std::size_t resamples = 1;
  KernelMode mode = KernelMode::closed_form;
  Mu11Method method = Mu11Method::factorized;
  OutputFormat format = OutputFormat::json;
};

/// Inclusive grid start, start + step, ..., <= stop.
struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> points() const;
};

/// Parses "start:stop:step"; throws InvalidArgument on a bad or empty grid.
TimeGrid parse_time_grid(std::string_view text);

struct SweepOptions {
  ScenarioInput input;
  /// "start:stop:step", parsed by cmd_sweep.
  std::string grid;
  std::size_t resamples = 1;
  KernelMode mode = KernelMode::closed_form;
  Mu11Method method = Mu11Method::factorized;
  unsigned threads = 1;
};

/// Sets every slack of the template to t and runs the variance pipeline.
std::vector<SweepRow> run_sweep(const Scenario& scenario_template, std::span<const double> ts,
                                std::size_t resamples, KernelMode mode, Mu11Method method,
                                unsigned threads = 1);

enum class VerifySuite { exact, montecarlo, kernels };

struct VerifyOptions {
  VerifySuite suite = VerifySuite::exact;
  std::uint64_t seed = kDefaultSeed;
  std::size_t replications = 20'000;
  unsigned threads = 1;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_verify_suite(const VerifyOptions& options);
std::string verify_json(const VerifyOptions& options, std::span<const CheckResult> checks);

Scenario load_input(const ScenarioInput& input);

int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err);
int cmd_variance(const VarianceOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

}  // namespace circrel::cli
