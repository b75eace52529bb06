#include "latflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "latflow/error.hpp"

namespace latflow {

using json = nlohmann::ordered_json;

namespace {

template <class T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

void dump(const json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump(v, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    default:
      out += j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path);
  f << text;
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["a"] = a;
  j["b"] = b;
  j["interval"] = {s1, s2};
  j["mode"] = mode;
  j["t_grid"] = t_grid;
  j["T"] = T ? json(*T) : json(nullptr);
  j["N"] = N;
  j["seed"] = seed;
  j["radii"] = radii;
  j["delta"] = delta;
  j["eps"] = eps;
  j["C"] = C;
  j["R"] = R;
  j["R_cap"] = R_cap;
  j["q_max"] = q_max;
  j["budget"] = budget;
  j["s"] = s ? json(*s) : json(nullptr);
  j["t_max"] = t_max;
  j["dt"] = dt;
  j["out"] = out;
  j["format"] = format;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  try {
    read(j, "command", c.command);
    read(j, "a", c.a);
    read(j, "b", c.b);
    if (j.contains("interval")) {
      const auto& iv = j.at("interval");
      if (!iv.is_array() || iv.size() != 2) throw ParseError("config interval must have two entries");
      c.s1 = iv[0].get<std::string>();
      c.s2 = iv[1].get<std::string>();
    }
    read(j, "mode", c.mode);
    read(j, "t_grid", c.t_grid);
    if (j.contains("T") && !j.at("T").is_null()) c.T = j.at("T").get<double>();
    read(j, "N", c.N);
    read(j, "seed", c.seed);
    read(j, "radii", c.radii);
    read(j, "delta", c.delta);
    read(j, "eps", c.eps);
    read(j, "C", c.C);
    read(j, "R", c.R);
    read(j, "R_cap", c.R_cap);
    read(j, "q_max", c.q_max);
    read(j, "budget", c.budget);
    if (j.contains("s") && !j.at("s").is_null()) c.s = j.at("s").get<std::string>();
    read(j, "t_max", c.t_max);
    read(j, "dt", c.dt);
    read(j, "out", c.out);
    read(j, "format", c.format);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad config: ") + e.what());
  }
  return c;
}

std::string CsvTable::str() const {
  std::string out;
  const auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

json Report::to_json() const {
  json j;
  j["schema"] = kSchema;
  j["command"] = config.command;
  j["config"] = config.to_json();
  j["results"] = results;
  j["flags"] = {{"budget_exceeded", budget_exceeded},
                {"precision_failures", precision_failures},
                {"warnings", warnings}};
  return j;
}

void write_report(const Report& report, const std::string& prefix, const std::string& format) {
  if (format != "json" && format != "csv" && format != "both") throw InvalidInput("unknown format " + format);
  if (format != "csv") write_file(prefix + ".json", dump_json(report.to_json()) + "\n");
  if (format != "json") write_file(prefix + ".csv", report.csv.str());
}

}  // namespace latflow
