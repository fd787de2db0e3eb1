#include "circrel/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>

#include <json.hpp>

#include "circrel/cli/scenario_io.hpp"
#include "circrel/distributions.hpp"
#include "circrel/error.hpp"
#include "circrel/oracles.hpp"
#include "circrel/resampler.hpp"

namespace circrel::cli {
namespace {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "circrel: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "circrel: " << e.what() << "\n";
    return kExitInput;
  }
}

Scenario samples_scenario(std::vector<LegSamples> legs, std::vector<double> slack) {
  Scenario s;
  s.plan.intervals = std::move(slack);
  for (auto& l : legs) s.legs.push_back(Leg::from_samples(std::move(l)));
  return validate_scenario(std::move(s));
}

Scenario exponential_scenario(std::size_t k, double delay_rate, double service_rate,
                              std::size_t n, std::vector<double> slack) {
  Scenario s;
  s.plan.intervals = std::move(slack);
  for (std::size_t i = 0; i < k; ++i) {
    s.legs.push_back(Leg::from_exponential({delay_rate, service_rate}, n));
  }
  return validate_scenario(std::move(s));
}

CheckResult near_check(std::string name, double actual, double expected, double tol) {
  const double diff = std::abs(actual - expected);
  return {std::move(name), diff <= tol,
          "actual=" + format_number(actual) + " expected=" + format_number(expected) +
              " diff=" + format_number(diff) + " tol=" + format_number(tol)};
}

double plugin_product(const Scenario& s) {
  double p = 1.0;
  for (std::size_t i = 0; i < s.k(); ++i) {
    p *= leg_reliability_plugin(*s.legs[i].samples(), s.plan.intervals[i]);
  }
  return p;
}

std::vector<CheckResult> exact_suite() {
  std::vector<CheckResult> out;
  const Scenario two_point = samples_scenario({{{1, 3}, {1, 3}}}, {4});
  {
    const auto r1 = enumerate_exact(two_point, 1);
    out.push_back(near_check("two_point_r1_mean", r1.expected_theta_star, 0.75, 1e-15));
    out.push_back(near_check("two_point_r1_variance", r1.exact_variance, 0.1875, 1e-15));
    const auto r2 = enumerate_exact(two_point, 2);
    out.push_back(near_check("two_point_r2_variance", r2.exact_variance, 0.09375, 1e-15));
  }

  const std::vector<std::pair<std::string, Scenario>> fixtures = {
      {"two_point", two_point},
      {"k2_mixed_sizes", samples_scenario({{{0, 2, 5}, {1, 4}}, {{1, 2}, {0, 3, 3}}}, {6, 4})},
      {"k2_ties", samples_scenario({{{1, 2, 3}, {2, 2, 5}}, {{0, 4}, {1, 2, 6}}}, {5, 6})},
      {"k1_three", samples_scenario({{{0.5, 1.5, 4}, {1, 2.5, 3}}}, {4})},
  };
  for (const auto& [name, s] : fixtures) {
    for (std::size_t r = 1; r <= 3; ++r) {
      const std::string tag = name + "_r" + std::to_string(r);
      const auto fixed = enumerate_exact(s, r, SampleTreatment::fixed);
      out.push_back(near_check(tag + "_unbiased", fixed.expected_theta_star, plugin_product(s), 1e-12));
      const auto joint = enumerate_exact(s, r, SampleTreatment::random);
      const auto analytic = variance_pipeline(s, r, KernelMode::plugin, Mu11Method::factorized);
      out.push_back(near_check(tag + "_variance", joint.exact_variance, analytic.variance, 1e-12));
    }
  }

  const Scenario all_success = samples_scenario({{{0, 1}, {0, 2}}, {{1}, {1, 1}}}, {10, 10});
  const auto deg = enumerate_exact(all_success, 3);
  out.push_back(near_check("degenerate_mean", deg.expected_theta_star, 1.0, 0.0));
  out.push_back(near_check("degenerate_variance", deg.exact_variance, 0.0, 0.0));
  return out;
}

std::vector<CheckResult> montecarlo_suite(const VerifyOptions& options) {
  struct Config {
    std::string name;
    Scenario scenario;
    std::size_t resamples;
  };
  const std::vector<Config> configs = {
      {"k2_n5_r10_t140", exponential_scenario(2, 0.05, 0.02, 5, {140, 140}), 10},
      {"k1_n3_r5_t100", exponential_scenario(1, 0.05, 0.02, 3, {100}), 5},
      {"k3_n10_r20_mixed_t", exponential_scenario(3, 0.05, 0.02, 10, {120, 160, 200}), 20},
  };
  std::vector<CheckResult> out;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const Config& cfg = configs[c];
    const auto analytic =
        variance_pipeline(cfg.scenario, cfg.resamples, KernelMode::closed_form, Mu11Method::factorized);
    const auto mc = simulate_pipeline_variance(cfg.scenario, cfg.resamples, options.replications,
                                               derive_stream_seed(options.seed, c), options.threads);
    out.push_back(near_check(cfg.name + "_variance_3se", mc.empirical_variance, analytic.variance,
                             3.0 * mc.standard_error_of_variance));
    out.push_back(near_check(cfg.name + "_mean_4se", mc.mean_theta_star, analytic.theta,
                             4.0 * mc.standard_error_of_mean));
  }
  return out;
}

std::vector<CheckResult> kernels_suite() {
  const std::vector<double> rates = {0.01, 0.02, 0.05, 0.1, 0.3};
  const std::vector<double> times = {5, 20, 60, 100, 140, 200, 300, 500};
  std::vector<CheckResult> out;

  double max_diff = 0.0;
  std::size_t compared = 0, skipped = 0;
  bool monotone = true;
  for (double lambda : rates) {
    for (double mu : rates) {
      const Leg leg = Leg::from_exponential({lambda, mu});
      double previous = 0.0;
      for (double t : times) {
        for (LegCase c : {LegCase::in_in, LegCase::out_out, LegCase::out_in, LegCase::in_out}) {
          const HFactor closed = h_factor(c, leg, t, KernelMode::closed_form);
          if (closed.near_singular_fallback) {
            ++skipped;
            continue;
          }
          const HFactor quad = h_factor(c, leg, t, KernelMode::quadrature);
          max_diff = std::max(max_diff, std::abs(closed.value - quad.value));
          ++compared;
        }
        const double r = leg_reliability_exponential({lambda, mu}, t);
        monotone = monotone && r >= previous;
        previous = r;
      }
    }
  }
  out.push_back({"closed_form_vs_quadrature", max_diff <= 1e-8,
                 "max_diff=" + format_number(max_diff) + " compared=" + std::to_string(compared) +
                     " in_tube=" + std::to_string(skipped) + " tol=1e-08"});
  out.push_back({"reliability_monotone_in_t", monotone, ""});

  // Continuity across singular tubes: values just inside and just outside
  // each tube edge, and the on-line value against the half-tube points.
  double max_jump = 0.0;
  bool flagged = true;
  for (double lambda : {0.01, 0.05, 0.2}) {
    for (double t : {20.0, 140.0, 400.0}) {
      for (double factor : {1.0, 2.0, 0.5}) {
        const double mu_line = lambda * factor;
        auto h_at = [&](LegCase c, double rel) {
          return h_factor(c, Leg::from_exponential({lambda, mu_line * (1 + rel)}), t,
                          KernelMode::closed_form)
              .value;
        };
        for (LegCase c : {LegCase::in_in, LegCase::out_in, LegCase::in_out}) {
          for (double side : {-1.0, 1.0}) {
            const double edge = side * kSingularTube;
            max_jump = std::max(max_jump, std::abs(h_at(c, edge * 0.999) - h_at(c, edge * 1.001)));
          }
          max_jump = std::max(max_jump, std::abs(h_at(c, 0.0) - h_at(c, 0.5 * kSingularTube)));
          max_jump = std::max(max_jump, std::abs(h_at(c, 0.0) - h_at(c, -0.5 * kSingularTube)));
        }
        const HFactor line = h_factor(factor == 2.0 ? LegCase::out_in : LegCase::in_out,
                                      Leg::from_exponential({lambda, mu_line}), t,
                                      KernelMode::closed_form);
        flagged = flagged && (factor == 1.0 || line.near_singular_fallback);
      }
    }
  }
  out.push_back({"singular_tube_continuity", max_jump <= 1e-6,
                 "max_jump=" + format_number(max_jump) + " tol=1e-06"});
  out.push_back({"singular_fallback_flagged", flagged, ""});

  // Plug-in sums against the generic empirical Stieltjes route.
  const LegSamples s{{0.5, 3, 3, 7.25, 12}, {1, 2, 2, 4.5, 9, 10}};
  Leg sample_leg = Leg::from_samples(s);
  double max_plugin = 0.0;
  for (double t : {0.0, 1.5, 4.0, 5.0, 9.75, 14.0, 30.0}) {
    for (LegCase c : {LegCase::in_in, LegCase::out_in, LegCase::in_out}) {
      max_plugin = std::max(max_plugin, std::abs(h_factor(c, sample_leg, t, KernelMode::plugin).value -
                                                 h_factor(c, sample_leg, t, KernelMode::quadrature).value));
    }
  }
  out.push_back({"plugin_vs_empirical_stieltjes", max_plugin <= 1e-12,
                 "max_diff=" + format_number(max_plugin) + " tol=1e-12"});
  return out;
}

}  // namespace

int exit_code_for(const Error& e) noexcept {
  switch (category_of(e.kind())) {
    case ErrorCategory::MissingData: return kExitMissingData;
    case ErrorCategory::Numeric: return kExitNumeric;
    case ErrorCategory::Input: break;
  }
  return kExitInput;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CIRCREL_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  return kDefaultSeed;
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> ts;
  const double span = stop - start;
  const auto count = static_cast<std::size_t>(std::floor(span / step + 1e-9)) + 1;
  ts.reserve(count);
  for (std::size_t j = 0; j < count; ++j) ts.push_back(start + static_cast<double>(j) * step);
  return ts;
}

TimeGrid parse_time_grid(std::string_view text) {
  double parts[3];
  std::string_view rest = text;
  for (int i = 0; i < 3; ++i) {
    const auto colon = rest.find(':');
    const std::string_view field = i < 2 ? rest.substr(0, colon) : rest;
    if ((i < 2 && colon == std::string_view::npos) || field.empty()) {
      throw Error(ErrorKind::InvalidArgument, "grid must be start:stop:step, got \"" + std::string(text) + "\"");
    }
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (ec != std::errc() || p != field.data() + field.size() || !std::isfinite(parts[i])) {
      throw Error(ErrorKind::InvalidArgument, "bad grid number \"" + std::string(field) + "\"");
    }
    if (i < 2) rest.remove_prefix(colon + 1);
  }
  const TimeGrid grid{parts[0], parts[1], parts[2]};
  if (!(grid.step > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid step must be > 0");
  if (grid.stop < grid.start) throw Error(ErrorKind::InvalidArgument, "grid is empty (stop < start)");
  if (grid.start < 0.0) throw Error(ErrorKind::InvalidArgument, "grid start must be >= 0");
  if ((grid.stop - grid.start) / grid.step > 1e7) {
    throw Error(ErrorKind::InvalidArgument, "grid has too many points");
  }
  return grid;
}

std::vector<SweepRow> run_sweep(const Scenario& scenario_template, std::span<const double> ts,
                                std::size_t resamples, KernelMode mode, Mu11Method method,
                                unsigned threads) {
  std::vector<SweepRow> rows(ts.size());
  std::vector<std::optional<Error>> failures(ts.size());
  parallel_chunks(ts.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      try {
        Scenario s = scenario_template;
        s.plan.intervals.assign(s.k(), ts[j]);
        const VarianceReport v = variance_pipeline(s, resamples, mode, method);
        rows[j] = {ts[j], v.theta, v.moments.mu11, v.variance};
      } catch (const Error& e) {
        failures[j] = e;
      }
    }
  });
  for (const auto& f : failures) {
    if (f) throw *f;
  }
  return rows;
}

std::vector<CheckResult> run_verify_suite(const VerifyOptions& options) {
  switch (options.suite) {
    case VerifySuite::exact: return exact_suite();
    case VerifySuite::montecarlo: return montecarlo_suite(options);
    case VerifySuite::kernels: return kernels_suite();
  }
  return {};
}

std::string verify_json(const VerifyOptions& options, std::span<const CheckResult> checks) {
  nlohmann::ordered_json j;
  const char* names[] = {"exact", "montecarlo", "kernels"};
  j["suite"] = names[static_cast<int>(options.suite)];
  j["seed"] = options.seed;
  if (options.suite == VerifySuite::montecarlo) j["replications"] = options.replications;
  bool all = true;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks) {
    all = all && c.passed;
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["passed"] = all;
  j["checks"] = std::move(arr);
  return j.dump(2) + "\n";
}

Scenario load_input(const ScenarioInput& input) {
  Scenario s = load_scenario(input.scenario, input.samples);
  if (input.sample_size) {
    if (*input.sample_size == 0) throw Error(ErrorKind::InvalidArgument, "--sample-size must be >= 1");
    for (Leg& leg : s.legs) {
      if (!leg.delay.sample_size && !leg.delay.has_samples()) leg.delay.sample_size = input.sample_size;
      if (!leg.service.sample_size && !leg.service.has_samples()) {
        leg.service.sample_size = input.sample_size;
      }
    }
  }
  return s;
}

int cmd_estimate(const EstimateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_input(options.input);
    const EstimateReport report =
        resample_estimate(s, {options.resamples, options.seed, options.threads});
    out << (options.format == OutputFormat::json ? estimate_json(report) : estimate_csv(report));
    return kExitOk;
  });
}

int cmd_variance(const VarianceOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_input(options.input);
    const VarianceReport report = variance_pipeline(s, options.resamples, options.mode, options.method);
    if (report.near_singular_fallback) {
      err << "circrel: note: near-singular rates, some kernels evaluated by quadrature\n";
    }
    out << (options.format == OutputFormat::json ? variance_json(report, s.plan.intervals)
                                                 : variance_csv(report));
    return kExitOk;
  });
}

int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TimeGrid grid = parse_time_grid(options.grid);
    const Scenario s = load_input(options.input);
    const auto ts = grid.points();
    const auto rows = run_sweep(s, ts, options.resamples, options.mode, options.method, options.threads);
    out << sweep_csv(rows);
    return kExitOk;
  });
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto checks = run_verify_suite(options);
    out << verify_json(options, checks);
    for (const CheckResult& c : checks) {
      if (!c.passed) err << "circrel: check failed: " << c.name << " (" << c.detail << ")\n";
    }
    const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    return ok ? kExitOk : kExitVerificationFailed;
  });
}

}  // namespace circrel::cli
