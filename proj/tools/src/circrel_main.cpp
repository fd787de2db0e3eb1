// circrel: resampling reliability estimates for turnaround plans.
//
//   circrel estimate SCENARIO [--samples CSV] --resamples R [--seed S] [--format json|csv]
//   circrel variance SCENARIO [--samples CSV] --resamples R [--mode M] [--method M]
//   circrel sweep    SCENARIO --t-grid START:STOP:STEP --resamples R
//   circrel verify   --suite exact|montecarlo|kernels [--seed S]

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circrel/cli/commands.hpp"

namespace {

using namespace circrel;
using namespace circrel::cli;

const std::map<std::string, KernelMode> kModes = {{"closed_form", KernelMode::closed_form},
                                                  {"quadrature", KernelMode::quadrature},
                                                  {"plugin", KernelMode::plugin},
                                                  {"auto", KernelMode::automatic}};
const std::map<std::string, Mu11Method> kMethods = {{"factorized", Mu11Method::factorized},
                                                    {"enumerate", Mu11Method::enumerate}};
const std::map<std::string, OutputFormat> kFormats = {{"json", OutputFormat::json},
                                                      {"csv", OutputFormat::csv}};
const std::map<std::string, VerifySuite> kSuites = {{"exact", VerifySuite::exact},
                                                    {"montecarlo", VerifySuite::montecarlo},
                                                    {"kernels", VerifySuite::kernels}};

template <class Enum>
CLI::Option* add_choice(CLI::App* cmd, const std::string& name, std::string& slot,
                        const std::map<std::string, Enum>& choices) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : choices) keys.push_back(k);
  return cmd->add_option(name, slot)->check(CLI::IsMember(keys));
}

void add_input(CLI::App* cmd, ScenarioInput& input, std::optional<std::size_t>& sample_size) {
  cmd->add_option("scenario", input.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--samples", input.samples, "CSV of samples (leg,kind,value)")->check(CLI::ExistingFile);
  cmd->add_option("--sample-size", sample_size,
                  "Sample size n for sides without samples or their own sample_size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resampling reliability of aircraft turnaround plans"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  std::optional<std::size_t> sample_size;
  std::string est_format = "json", var_format = "json";
  std::string var_mode = "closed_form", sw_mode = "closed_form";
  std::string var_method = "factorized", sw_method = "factorized";
  std::string ver_suite = "exact";

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Resampling estimate of the plan reliability");
  add_input(estimate, est.input, sample_size);
  estimate->add_option("--resamples,-r", est.resamples, "Realizations r")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--seed", seed_flag, "Random seed (default: $CIRCREL_SEED or 42)");
  add_choice(estimate, "--format", est_format, kFormats);
  estimate->add_option("--threads", est.threads, "Worker threads (0 = all cores)");

  VarianceOptions var;
  auto* variance = app.add_subcommand("variance", "Exact variance of the resampling estimator");
  add_input(variance, var.input, sample_size);
  variance->add_option("--resamples,-r", var.resamples)->required()->check(CLI::PositiveNumber);
  add_choice(variance, "--mode", var_mode, kModes);
  add_choice(variance, "--method", var_method, kMethods);
  add_choice(variance, "--format", var_format, kFormats);

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Variance over a grid of equal slacks (CSV)");
  add_input(sweep, sw.input, sample_size);
  sweep->add_option("--t-grid", sw.grid, "start:stop:step, stop inclusive")->required();
  sweep->add_option("--resamples,-r", sw.resamples)->required()->check(CLI::PositiveNumber);
  add_choice(sweep, "--mode", sw_mode, kModes);
  add_choice(sweep, "--method", sw_method, kMethods);
  sweep->add_option("--threads", sw.threads);

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "Run oracle cross-checks");
  add_choice(verify, "--suite", ver_suite, kSuites)->required();
  verify->add_option("--seed", seed_flag);
  verify->add_option("--replications", ver.replications, "Monte Carlo replications")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100'000'000}));
  verify->add_option("--threads", ver.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  const std::uint64_t seed = seed_flag.value_or(default_seed());
  est.format = kFormats.at(est_format);
  var.format = kFormats.at(var_format);
  var.mode = kModes.at(var_mode);
  sw.mode = kModes.at(sw_mode);
  var.method = kMethods.at(var_method);
  sw.method = kMethods.at(sw_method);
  ver.suite = kSuites.at(ver_suite);

  if (*estimate) {
    est.seed = seed;
    est.input.sample_size = sample_size;
    return cmd_estimate(est, std::cout, std::cerr);
  }
  if (*variance) {
    var.input.sample_size = sample_size;
    return cmd_variance(var, std::cout, std::cerr);
  }
  if (*sweep) {
    sw.input.sample_size = sample_size;
    return cmd_sweep(sw, std::cout, std::cerr);
  }
  ver.seed = seed;
  return cmd_verify(ver, std::cout, std::cerr);
}
