#include "circrel/cli/reports.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "circrel/error.hpp"

namespace circrel::cli {
namespace {

using nlohmann::ordered_json;

KernelMode parse_mode(const std::string& s) {
  for (KernelMode m : {KernelMode::closed_form, KernelMode::quadrature, KernelMode::plugin,
                       KernelMode::automatic}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::UnknownKind, "kernel mode \"" + s + "\"");
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size()) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ": bad number \"" + std::string(field) + "\"");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

std::string estimate_json(const EstimateReport& report) {
  ordered_json j;
  j["theta_star"] = report.theta_star;
  j["resamples"] = report.resamples;
  j["seed"] = report.seed;
  j["success_count"] = report.success_count;
  return j.dump(2) + "\n";
}

std::string estimate_csv(const EstimateReport& report) {
  return "theta_star,resamples,seed,success_count\n" + format_number(report.theta_star) + "," +
         std::to_string(report.resamples) + "," + std::to_string(report.seed) + "," +
         std::to_string(report.success_count) + "\n";
}

EstimateReport parse_estimate_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    EstimateReport r;
    r.theta_star = j.at("theta_star").get<double>();
    r.resamples = j.at("resamples").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.success_count = j.at("success_count").get<std::size_t>();
    return r;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::string variance_json(const VarianceReport& report, std::span<const double> intervals) {
  ordered_json j;
  j["theta"] = report.theta;
  j["mu"] = report.moments.mu;
  j["mu2"] = report.moments.mu2;
  j["mu11"] = report.moments.mu11;
  j["resamples"] = report.resamples;
  j["variance"] = report.variance;
  j["standard_error"] = std::sqrt(report.variance);
  j["kernel_mode"] = std::string(to_string(report.kernel_mode));
  j["method"] = std::string(to_string(report.method));
  j["near_singular_fallback"] = report.near_singular_fallback;
  ordered_json legs = ordered_json::array();
  for (std::size_t i = 0; i < report.per_leg.size(); ++i) {
    const LegKernels& k = report.per_leg[i];
    ordered_json leg;
    leg["leg"] = i + 1;
    if (i < intervals.size()) leg["t"] = intervals[i];
    leg["mode"] = std::string(to_string(k.mode));
    leg["h"] = {{"in_in", k.in_in}, {"out_out", k.out_out}, {"out_in", k.out_in}, {"in_out", k.in_out}};
    leg["near_singular_fallback"] = k.near_singular_fallback;
    legs.push_back(std::move(leg));
  }
  j["legs"] = std::move(legs);
  return j.dump(2) + "\n";
}

std::string variance_csv(const VarianceReport& report) {
  std::string out = "leg,mode,in_in,out_out,out_in,in_out,near_singular_fallback\n";
  for (std::size_t i = 0; i < report.per_leg.size(); ++i) {
    const LegKernels& k = report.per_leg[i];
    out += std::to_string(i + 1) + "," + std::string(to_string(k.mode)) + "," +
           format_number(k.in_in) + "," + format_number(k.out_out) + "," + format_number(k.out_in) +
           "," + format_number(k.in_out) + "," + (k.near_singular_fallback ? "1" : "0") + "\n";
  }
  out += "\ntheta,mu11,resamples,variance,kernel_mode,method\n";
  out += format_number(report.theta) + "," + format_number(report.moments.mu11) + "," +
         std::to_string(report.resamples) + "," + format_number(report.variance) + "," +
         std::string(to_string(report.kernel_mode)) + "," + std::string(to_string(report.method)) +
         "\n";
  return out;
}

VarianceReport parse_variance_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    VarianceReport r;
    r.theta = j.at("theta").get<double>();
    r.moments = MomentSet{j.at("mu").get<double>(), j.at("mu2").get<double>(),
                          j.at("mu11").get<double>()};
    r.resamples = j.at("resamples").get<std::size_t>();
    r.variance = j.at("variance").get<double>();
    r.kernel_mode = parse_mode(j.at("kernel_mode").get<std::string>());
    r.method = j.at("method").get<std::string>() == "enumerate" ? Mu11Method::enumerate
                                                                : Mu11Method::factorized;
    r.near_singular_fallback = j.at("near_singular_fallback").get<bool>();
    for (const auto& leg : j.at("legs")) {
      LegKernels k;
      k.mode = parse_mode(leg.at("mode").get<std::string>());
      const auto& h = leg.at("h");
      k.in_in = h.at("in_in").get<double>();
      k.out_out = h.at("out_out").get<double>();
      k.out_in = h.at("out_in").get<double>();
      k.in_out = h.at("in_out").get<double>();
      k.near_singular_fallback = leg.at("near_singular_fallback").get<bool>();
      r.per_leg.push_back(k);
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "t,theta,mu11,variance\n";
  for (const SweepRow& r : rows) {
    out += format_number(r.t) + "," + format_number(r.theta) + "," + format_number(r.mu11) + "," +
           format_number(r.variance) + "\n";
  }
  return out;
}

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "t,theta,mu11,variance") {
        throw Error(ErrorKind::ParseError, "expected header t,theta,mu11,variance");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (std::size_t c; (c = rest.find(',')) != std::string_view::npos; rest.remove_prefix(c + 1)) {
      fields.push_back(rest.substr(0, c));
    }
    fields.push_back(rest);
    if (fields.size() != 4) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    rows.push_back({parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                    parse_double(fields[2], line_no), parse_double(fields[3], line_no)});
  }
  return rows;
}

}  // namespace circrel::cli
