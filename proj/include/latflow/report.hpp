#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace latflow {

/// Everything a run was asked to do. Line parameters stay as the strings the
/// user typed so the echo is verbatim.
struct RunConfig {
  std::string command;
  std::string a = "0";
  std::string b = "0";
  std::string s1 = "0";
  std::string s2 = "1";
  std::string mode = "auto";
  std::vector<double> t_grid;
  std::optional<double> T;
  std::uint64_t N = 100;
  std::uint64_t seed = 1;
  std::vector<double> radii;
  double delta = 0.2;
  std::string eps = "1";
  std::vector<std::string> C = {"1", "1/1000", "1/1000000"};
  std::string R = "2";
  std::string R_cap = "auto";
  std::uint64_t q_max = 1'000'000;
  std::uint64_t budget = 100'000'000;
  std::optional<std::string> s;
  double t_max = 6.0;
  double dt = 0.05;
  std::string out;
  std::string format = "json";

  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Doubles as %.17g; NaN and infinities become null.
std::string format_double(double x);

/// nlohmann's dump, except that floating-point numbers use format_double.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

struct Report {
  static constexpr const char* kSchema = "latflow-report/1";

  RunConfig config;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
  bool budget_exceeded = false;
  std::uint64_t precision_failures = 0;
  CsvTable csv;

  nlohmann::ordered_json to_json() const;
};

/// Writes <prefix>.json and/or <prefix>.csv according to `format`
/// (json, csv or both).
void write_report(const Report& report, const std::string& prefix, const std::string& format);

}  // namespace latflow
