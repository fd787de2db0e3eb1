#include "circrel/cli/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "circrel/error.hpp"

namespace circrel::cli {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorKind::ParseError, where + ": expected a number");
  return j.get<double>();
}

SideModel parse_side(const json& j, std::size_t leg, const char* name) {
  const std::string where = std::string("legs[") + std::to_string(leg) + "]." + name;
  if (!j.is_object()) throw Error(ErrorKind::ParseError, where + ": expected an object", leg);
  SideModel side;
  for (const auto& [key, value] : j.items()) {
    if (key == "exponential") {
      if (!value.is_object() || !value.contains("rate")) {
        throw Error(ErrorKind::ParseError, where + ".exponential: expected {\"rate\": number}", leg);
      }
      side.rate = as_number(value.at("rate"), where + ".exponential.rate");
    } else if (key == "samples") {
      if (!value.is_array()) throw Error(ErrorKind::ParseError, where + ".samples: expected an array", leg);
      for (const auto& v : value) side.samples.push_back(as_number(v, where + ".samples"));
    } else if (key == "sample_size") {
      if (!value.is_number_unsigned()) {
        throw Error(ErrorKind::ParseError, where + ".sample_size: expected a positive integer", leg);
      }
      side.sample_size = value.get<std::size_t>();
    } else {
      throw Error(ErrorKind::UnknownKind, where + ": unknown key \"" + key + "\"", leg);
    }
  }
  return side;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario parse_scenario_document(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "scenario must be a JSON object");

  Scenario s;
  if (doc.contains("label")) s.label = doc.at("label").get<std::string>();
  if (doc.contains("time_unit")) s.time_unit = doc.at("time_unit").get<std::string>();
  if (!doc.contains("intervals") || !doc.at("intervals").is_array()) {
    throw Error(ErrorKind::ParseError, "\"intervals\" must be an array");
  }
  for (const auto& t : doc.at("intervals")) s.plan.intervals.push_back(as_number(t, "intervals"));
  if (!doc.contains("legs") || !doc.at("legs").is_array()) {
    throw Error(ErrorKind::ParseError, "\"legs\" must be an array");
  }
  std::size_t i = 0;
  for (const auto& leg : doc.at("legs")) {
    if (!leg.is_object() || !leg.contains("delay") || !leg.contains("service")) {
      throw Error(ErrorKind::ParseError, "each leg needs \"delay\" and \"service\"", i);
    }
    s.legs.push_back(Leg{parse_side(leg.at("delay"), i, "delay"),
                         parse_side(leg.at("service"), i, "service")});
    ++i;
  }
  return s;
}

}  // namespace

Scenario parse_scenario_json(std::string_view text) {
  try {
    return parse_scenario_document(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

void attach_samples_csv(Scenario& scenario, std::istream& csv) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(csv, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "leg,kind,value") {
        throw Error(ErrorKind::ParseError, "line 1: expected header leg,kind,value");
      }
      header_seen = true;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw Error(ErrorKind::ParseError, where + ": expected 3 fields");
    }
    const std::string_view leg_field = trim(row.substr(0, c1));
    const std::string_view kind = trim(row.substr(c1 + 1, c2 - c1 - 1));
    const std::string_view value_field = trim(row.substr(c2 + 1));

    std::size_t leg = 0;
    auto [lp, lec] = std::from_chars(leg_field.data(), leg_field.data() + leg_field.size(), leg);
    if (lec != std::errc() || lp != leg_field.data() + leg_field.size() || leg == 0) {
      throw Error(ErrorKind::ParseError, where + ": bad leg \"" + std::string(leg_field) + "\"");
    }
    double value = 0.0;
    auto [vp, vec] =
        std::from_chars(value_field.data(), value_field.data() + value_field.size(), value);
    if (vec != std::errc() || vp != value_field.data() + value_field.size()) {
      throw Error(ErrorKind::ParseError, where + ": bad value \"" + std::string(value_field) + "\"",
                  leg - 1);
    }
    if (leg > scenario.legs.size()) {
      throw Error(ErrorKind::IndexOutOfRange,
                  where + ": plan has " + std::to_string(scenario.legs.size()) + " legs", leg - 1);
    }
    if (!(value >= 0.0)) {
      throw Error(ErrorKind::InvalidSample, where + ": negative value " + std::string(value_field),
                  leg - 1);
    }
    Leg& target = scenario.legs[leg - 1];
    if (kind == "delay") {
      target.delay.samples.push_back(value);
    } else if (kind == "service") {
      target.service.samples.push_back(value);
    } else {
      throw Error(ErrorKind::UnknownKind, where + ": kind \"" + std::string(kind) + "\"", leg - 1);
    }
  }
  if (!header_seen) throw Error(ErrorKind::ParseError, "empty samples CSV");
}

Scenario load_scenario(const std::filesystem::path& scenario_path,
                       const std::optional<std::filesystem::path>& samples_csv) {
  Scenario s = parse_scenario_json(read_file(scenario_path));
  if (samples_csv) {
    std::ifstream in(*samples_csv);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + samples_csv->string());
    attach_samples_csv(s, in);
  }
  return validate_scenario(std::move(s));
}

}  // namespace circrel::cli
