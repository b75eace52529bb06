#include "latflow/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "latflow/diophantine.hpp"
#include "latflow/error.hpp"
#include "latflow/experiments.hpp"

namespace latflow::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kReportWitnessRows = 1000;

json integer(const mpz_class& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

json exact(const Scalar& x) {
  if (x.mode() == ScalarMode::rational) return json(x.as_rational().get_str());
  return json(x.to_string());
}

std::string cell(double x) { return format_double(x); }
std::string cell(const mpz_class& z) { return z.get_str(); }
std::string cell(bool b) { return b ? "1" : "0"; }

json vector_json(const IntegerVec3& v) { return {integer(v.p1), integer(v.p2), integer(v.q)}; }

Scalar parse_in(const std::string& text, const ModeSpec& mode) { return parse_scalar(text, mode); }

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
      if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) {
        throw ParseError("time grid must be start:stop:step with step > 0");
      }
      const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
      for (std::size_t k = 0; k <= n; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
  } catch (const std::logic_error&) {
    throw ParseError("cannot parse time grid '" + text + "'");
  }
  if (out.empty()) throw ParseError("empty time grid");
  return out;
}

json witness_json(const DiophantineWitness& w) {
  return {{"q", integer(w.q)},
          {"p1", integer(w.p1)},
          {"p2", integer(w.p2)},
          {"residual1", w.residual1.to_double()},
          {"residual2", w.residual2.to_double()},
          {"residual1_exact", exact(w.residual1)},
          {"residual2_exact", exact(w.residual2)},
          {"bound", w.bound.to_double()},
          {"class", to_string(w.tag)}};
}

json search_json(const WitnessSearch& s, std::uint64_t q_max) {
  json list = json::array();
  for (std::size_t i = 0; i < s.witnesses.size() && i < kReportWitnessRows; ++i) {
    list.push_back(witness_json(s.witnesses[i]));
  }
  return {{"q_max", q_max},
          {"count", s.count},
          {"listed", list.size()},
          {"truncated", s.truncated || s.count > list.size()},
          {"witnesses", list}};
}

void add_witness_rows(CsvTable& csv, const std::string& table, const WitnessSearch& s) {
  for (std::size_t i = 0; i < s.witnesses.size() && i < kReportWitnessRows; ++i) {
    const auto& w = s.witnesses[i];
    csv.rows.push_back({table, cell(w.q), cell(w.p1), cell(w.p2), cell(w.residual1.to_double()),
                        cell(w.residual2.to_double()), cell(w.bound.to_double())});
  }
}

}  // namespace

ModeSpec resolve_mode(const RunConfig& config, bool with_interval) {
  if (config.mode != "auto") return ModeSpec::parse(config.mode);
  bool exact = is_exact_literal(config.a) && is_exact_literal(config.b);
  if (with_interval) exact = exact && is_exact_literal(config.s1) && is_exact_literal(config.s2);
  return exact ? ModeSpec::rational() : ModeSpec::bigfloat(256);
}

LineSegmentSpec make_line(const RunConfig& config) {
  const ModeSpec mode = resolve_mode(config);
  return LineSegmentSpec(parse_in(config.a, mode), parse_in(config.b, mode), parse_in(config.s1, mode),
                         parse_in(config.s2, mode), mode);
}

Report classify(const RunConfig& config) {
  const ModeSpec mode = resolve_mode(config, false);
  const Scalar a = parse_in(config.a, mode);
  const Scalar b = parse_in(config.b, mode);
  if (config.C.empty()) throw InvalidInput("classify needs at least one C");
  std::vector<Scalar> cs;
  for (const auto& c : config.C) cs.push_back(scalar_from_decimal(c, ModeSpec::rational()));
  const Scalar eps = scalar_from_decimal(config.eps, ModeSpec::rational());

  Report report;
  report.config = config;
  report.csv.header = {"table", "q", "p1", "p2", "residual1", "residual2", "bound"};
  json& r = report.results;
  r["mode"] = mode.to_string();

  std::vector<std::string> verdicts;
  if (mode.kind == ScalarMode::rational) {
    const auto cert = rational_certificate(a, b);
    r["rational_certificate"] = {{"p1", integer(cert->p1)},
                                 {"p2", integer(cert->p2)},
                                 {"q", integer(cert->q)},
                                 {"annihilator", vector_json(cert->annihilator())}};
    verdicts.push_back("rational point: certified (p1, p2, q) = (" + cert->p1.get_str() + ", " + cert->p2.get_str() +
                       ", " + cert->q.get_str() + ")");
  } else {
    r["rational_certificate"] = nullptr;
  }

  const WitnessSearch w2 = w2_witness_search(a, b, cs.front(), config.q_max);
  r["w2"] = search_json(w2, config.q_max);
  r["w2"]["C"] = config.C.front();
  add_witness_rows(report.csv, "w2", w2);

  const WitnessSearch w2eps = w2eps_witness_search(a, b, eps, config.q_max);
  r["w2eps"] = search_json(w2eps, config.q_max);
  r["w2eps"]["eps"] = config.eps;
  add_witness_rows(report.csv, "w2eps", w2eps);

  json profile = json::array();
  bool every_c = true;
  for (const auto& entry : w2inf_profile(a, b, cs, config.q_max)) {
    json row = {{"C", exact(entry.C)}};
    row["witness"] = entry.witness ? witness_json(*entry.witness) : json(nullptr);
    every_c = every_c && entry.witness.has_value();
    profile.push_back(row);
    if (entry.witness) {
      const auto& w = *entry.witness;
      report.csv.rows.push_back({"w2inf", cell(w.q), cell(w.p1), cell(w.p2), cell(w.residual1.to_double()),
                                 cell(w.residual2.to_double()), cell(w.bound.to_double())});
    }
  }
  r["w2inf"] = profile;

  const std::string range = " for q <= " + std::to_string(config.q_max) + " (bounded search, not a proof)";
  verdicts.push_back("W2 at C = " + config.C.front() + ": " + std::to_string(w2.count) + " witnesses" + range);
  verdicts.push_back("W2eps at eps = " + config.eps + ": " + std::to_string(w2eps.count) + " witnesses" + range);
  verdicts.push_back(std::string("W2inf: ") + (every_c ? "a witness for every listed C" : "no witness for some C") +
                     range);
  r["verdicts"] = verdicts;
  return report;
}

Report orbit(const RunConfig& config) {
  const LineSegmentSpec line = make_line(config);
  const std::vector<double> grid = config.t_grid.empty() ? parse_grid("0:8:1") : config.t_grid;
  const bool auto_cap = config.R_cap == "auto";
  const Scalar cap = auto_cap ? Scalar(1) : parse_in(config.R_cap, ModeSpec::rational());
  Report report;
  report.config = config;
  report.config.t_grid = grid;
  report.csv.header = {"t", "min_value", "p1", "p2", "q", "escape_fraction"};
  json rows = json::array();
  for (double t : grid) {
    const FlowTime ft(t);
    auto m = segment_minimum(line, ft, cap, config.budget);
    // With an automatic cap, doubling until a vector shows up finds the
    // minimum: nothing was below the previous cap.
    for (Scalar c = cap; auto_cap && !m && c < Scalar(1 << 20);) {
      c = c * Scalar(2);
      m = segment_minimum(line, ft, c, config.budget);
    }
    const double escape = escape_mass_fraction(line, ft, config.delta, config.N, config.seed);
    json row = {{"t", t}};
    if (m) {
      row["min_value"] = m->value.to_double();
      row["vector"] = vector_json(m->vector);
      row["candidates"] = m->candidates;
      report.csv.rows.push_back({cell(t), cell(m->value.to_double()), cell(m->vector.p1), cell(m->vector.p2),
                                 cell(m->vector.q), cell(escape)});
    } else {
      row["min_value"] = nullptr;
      row["vector"] = nullptr;
      report.csv.rows.push_back({cell(t), "", "", "", "", cell(escape)});
    }
    row["escape_fraction"] = escape;
    rows.push_back(row);
  }
  report.results["mode"] = line.mode().to_string();
  report.results["R_cap"] = config.R_cap;
  report.results["rows"] = rows;
  return report;
}

Report density(const RunConfig& config) {
  if (!config.T) throw InvalidInput("density needs --T");
  const LineSegmentSpec line = make_line(config);
  const Scalar R = parse_in(config.R, ModeSpec::rational());
  const DensityProfile p = ir_density(line, R, *config.T, config.q_max);
  Report report;
  report.config = config;
  report.csv.header = {"q", "p1", "p2", "residual", "lo", "hi", "unbounded"};
  json intervals = json::array();
  for (const auto& e : p.intervals) {
    intervals.push_back({{"q", integer(e.q)},
                         {"p1", integer(e.p1)},
                         {"p2", integer(e.p2)},
                         {"residual", e.residual.to_double()},
                         {"lo", e.lo},
                         {"hi", e.unbounded ? json(nullptr) : json(e.hi)},
                         {"unbounded", e.unbounded}});
    report.csv.rows.push_back({cell(e.q), cell(e.p1), cell(e.p2), cell(e.residual.to_double()), cell(e.lo),
                               e.unbounded ? "inf" : cell(e.hi), cell(e.unbounded)});
  }
  json& r = report.results;
  r["mode"] = line.mode().to_string();
  r["R"] = config.R;
  r["R1"] = exact(p.R1);
  r["T"] = p.T;
  r["union_fraction"] = p.union_fraction;
  r["direct_fraction"] = p.direct_fraction;
  r["grid_step"] = p.grid_step;
  r["rational_hit"] = p.rational_hit;
  r["coverage_warning"] = p.coverage_warning;
  r["intervals"] = intervals;
  if (p.coverage_warning) report.warnings.push_back("q_max does not cover [0, T]: E_q with q > q_max may meet it");
  if (p.rational_hit) report.warnings.push_back("zero residual: an unbounded E_q was clipped at T");
  return report;
}

Report equidist(const RunConfig& config) {
  if (config.t_grid.empty()) throw InvalidInput("equidist needs --t-list");
  if (config.N < 1) throw InvalidInput("equidist needs N >= 1");
  if (static_cast<double>(config.N) * static_cast<double>(config.t_grid.size()) > static_cast<double>(config.budget)) {
    throw BudgetError("samples x times exceeds the budget");
  }
  const LineSegmentSpec line = make_line(config);
  const std::vector<double> radii = config.radii.empty() ? std::vector<double>{1.5} : config.radii;
  Report report;
  report.config = config;
  report.config.radii = radii;
  report.csv.header = {"t", "s", "lambda1"};
  for (double r : radii) report.csv.header.push_back("count_r" + format_double(r));
  for (const char* f : {"certified", "escalated", "precision_failure"}) report.csv.header.push_back(f);

  json per_t = json::array();
  std::vector<std::vector<double>> laws;
  for (double t : config.t_grid) {
    const auto samples = sample_translate(line, FlowTime(t), config.N, config.seed, radii);
    std::vector<double> law;
    std::vector<double> mean(radii.size(), 0.0);
    std::uint64_t failures = 0;
    for (const auto& s : samples) {
      std::vector<std::string> row = {cell(t), cell(s.s.to_double()), cell(s.lambda1.to_double())};
      if (s.precision_failure) {
        ++failures;
        row.resize(3 + radii.size());
      } else {
        law.push_back(s.lambda1.to_double());
        for (std::size_t k = 0; k < radii.size(); ++k) {
          mean[k] += static_cast<double>(s.counts[k]);
          row.push_back(std::to_string(s.counts[k]));
        }
      }
      row.push_back(cell(s.certified));
      row.push_back(cell(s.escalated));
      row.push_back(cell(s.precision_failure));
      report.csv.rows.push_back(std::move(row));
    }
    const double used = static_cast<double>(samples.size() - failures);
    json counts = json::array();
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double volume = std::pow(2 * radii[k], 3);
      counts.push_back({{"radius", radii[k]},
                        {"mean_count", used > 0 ? mean[k] / used : std::nan("")},
                        {"siegel_volume_external", volume}});
    }
    report.precision_failures += failures;
    per_t.push_back({{"t", t},
                     {"N", samples.size()},
                     {"escape_fraction", escape_fraction_of(samples, config.delta)},
                     {"precision_failures", failures},
                     {"mean_counts", counts}});
    laws.push_back(std::move(law));
  }
  json ks = json::array();
  for (std::size_t i = 0; i + 1 < laws.size(); ++i) {
    const double d = laws[i].empty() || laws[i + 1].empty() ? std::nan("") : ks_distance(laws[i], laws[i + 1]);
    ks.push_back({{"t1", config.t_grid[i]}, {"t2", config.t_grid[i + 1]}, {"ks", d}});
  }
  report.results["mode"] = line.mode().to_string();
  report.results["delta"] = config.delta;
  report.results["per_t"] = per_t;
  report.results["ks"] = ks;
  report.results["note"] = "siegel_volume_external is the Siegel mean-value target (2r)^3, an outside reference";
  return report;
}

Report dirichlet(const RunConfig& config) {
  if (!config.s) throw InvalidInput("dirichlet needs --s");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  const LineSegmentSpec line = make_line(config);
  const bool irrational_s = line.mode().kind == ScalarMode::rational && !is_exact_literal(*config.s);
  const Scalar s = parse_in(*config.s, irrational_s ? ModeSpec::bigfloat(256) : line.mode());
  const TrajectoryProbe probe = trajectory_probe(line, s, config.delta, config.t_max, config.dt);

  const mpq_class sq = s.to_rational();
  const Scalar x1(sq);
  const Scalar x2(mpq_class(line.a_exact() * sq + line.b_exact()));
  const double root = std::cbrt(config.delta);
  const Scalar delta(config.delta);

  Report report;
  report.config = config;
  report.csv.header = {"t", "lambda1", "in_K", "T", "direct_solvable", "dynamic_solvable", "marginal"};
  json checks = json::array();
  std::size_t compared = 0, agree = 0;
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.5 / config.dt)));
  for (std::size_t k = 0; k < probe.times.size(); ++k) {
    const double t = probe.times[k];
    const double lambda1 = probe.lambda1[k];
    const bool in_k = lambda1 >= root;
    std::vector<std::string> row = {cell(t), cell(lambda1), cell(in_k)};
    const double T = root * std::exp(t);
    if (k % stride == 0 && T <= kDirichletTMax) {
      const auto verdict = dirichlet_direct(x1, x2, delta, {Scalar(T)}).front();
      const bool dynamic = lambda1 <= root;
      const bool marginal = std::abs(lambda1 - root) <= 0.02;
      if (!marginal) {
        ++compared;
        if (dynamic == verdict.solvable) ++agree;
      }
      checks.push_back({{"t", t},
                        {"T", T},
                        {"lambda1", lambda1},
                        {"direct_solvable", verdict.solvable},
                        {"dynamic_solvable", dynamic},
                        {"marginal", marginal},
                        {"solution", verdict.solution ? vector_json(*verdict.solution) : json(nullptr)}});
      row.insert(row.end(), {cell(T), cell(verdict.solvable), cell(dynamic), cell(marginal)});
    } else {
      row.insert(row.end(), {"", "", "", ""});
    }
    report.csv.rows.push_back(std::move(row));
  }
  json& r = report.results;
  r["mode"] = line.mode().to_string();
  r["threshold"] = root;
  r["first_entry"] = probe.first_entry ? json(*probe.first_entry) : json(nullptr);
  r["last_exit"] = probe.last_exit ? json(*probe.last_exit) : json(nullptr);
  r["tail_outside"] = probe.tail_outside;
  r["verdict"] = probe.tail_outside ? "candidate improvable at this horizon" : "not improvable at this horizon";
  r["checks"] = checks;
  r["agreement"] = compared ? json(static_cast<double>(agree) / static_cast<double>(compared)) : json(nullptr);
  r["compared"] = compared;
  return report;
}

Report run(const RunConfig& config) {
  if (config.command == "classify") return classify(config);
  if (config.command == "orbit") return orbit(config);
  if (config.command == "density") return density(config);
  if (config.command == "equidist") return equidist(config);
  if (config.command == "dirichlet") return dirichlet(config);
  throw InvalidInput("unknown command '" + config.command + "'");
}

namespace {

void add_common(CLI::App* app, RunConfig& c, std::string& interval) {
  app->add_option("a", c.a, "a (decimal, p/q, sqrt2, sqrt3, golden, liouville:k)")->required();
  app->add_option("b", c.b, "b")->required();
  app->add_option("--interval", interval, "segment I as s1,s2");
  app->add_option("--mode", c.mode, "auto, f64, bigfloat:<bits> or rational");
  app->add_option("--seed", c.seed, "experiment seed");
  app->add_option("--q-max", c.q_max, "largest q scanned");
  app->add_option("--budget", c.budget, "candidate or sample budget");
  app->add_option("--out", c.out, "output path prefix (writes <prefix>.json / .csv)");
  app->add_option("--format", c.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
}

void apply_interval(RunConfig& c, std::string interval) {
  if (interval.empty()) return;
  if (interval.front() == '[' && interval.back() == ']') interval = interval.substr(1, interval.size() - 2);
  const auto comma = interval.find(',');
  if (comma == std::string::npos) throw ParseError("interval must be s1,s2");
  c.s1 = interval.substr(0, comma);
  c.s2 = interval.substr(comma + 1);
}

std::string summary(const Report& report) {
  const json& r = report.results;
  std::ostringstream os;
  os << report.config.command << " (" << r.value("mode", std::string("?")) << ")\n";
  if (r.contains("verdicts")) {
    for (const auto& v : r["verdicts"]) os << "  " << v.get<std::string>() << "\n";
  }
  if (r.contains("union_fraction")) {
    os << "  union " << format_double(r["union_fraction"].get<double>()) << "  direct "
       << format_double(r["direct_fraction"].get<double>()) << "\n";
  }
  if (r.contains("verdict")) os << "  " << r["verdict"].get<std::string>() << "\n";
  for (const auto& w : report.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diagonal flow on planar lines: Diophantine witnesses and orbit experiments"};
  app.require_subcommand(1);
  RunConfig c;
  std::string interval, t_grid, config_path;
  std::optional<std::string> s;
  double T = 0.0;

  auto* classify_cmd = app.add_subcommand("classify", "rational certificate and W2 / W2eps / W2inf searches");
  add_common(classify_cmd, c, interval);
  classify_cmd->add_option("--C", c.C, "C values, descending")->delimiter(',');
  classify_cmd->add_option("--eps", c.eps, "exponent excess for W2eps");

  auto* orbit_cmd = app.add_subcommand("orbit", "segment minima and escape fractions along a t grid");
  add_common(orbit_cmd, c, interval);
  orbit_cmd->add_option("--t-grid", t_grid, "start:stop:step or t1,t2,...");
  orbit_cmd->add_option("--R-cap", c.R_cap, "cap on segment minima, or auto (double from 1)");
  orbit_cmd->add_option("--delta", c.delta, "escape threshold");
  orbit_cmd->add_option("--N", c.N, "samples per t");

  auto* density_cmd = app.add_subcommand("density", "I_R density: E_q union and direct grid estimate");
  add_common(density_cmd, c, interval);
  density_cmd->add_option("--R", c.R, "radius R");
  density_cmd->add_option("--T", T, "horizon")->required();

  auto* equidist_cmd = app.add_subcommand("equidist", "translate statistics, KS distances and point counts");
  add_common(equidist_cmd, c, interval);
  equidist_cmd->add_option("--t-list", t_grid, "t1,t2,... or start:stop:step")->required();
  equidist_cmd->add_option("--N", c.N, "samples per t");
  equidist_cmd->add_option("--radii", c.radii, "count radii")->delimiter(',');
  equidist_cmd->add_option("--delta", c.delta, "escape threshold");

  auto* dirichlet_cmd = app.add_subcommand("dirichlet", "trajectory probe with a direct Dirichlet cross-check");
  add_common(dirichlet_cmd, c, interval);
  dirichlet_cmd->add_option("--s", s, "point s on the segment")->required();
  dirichlet_cmd->add_option("--delta", c.delta, "delta");
  dirichlet_cmd->add_option("--t-max", c.t_max, "horizon in t");
  dirichlet_cmd->add_option("--dt", c.dt, "grid step (<= 0.05)");

  auto* replay_cmd = app.add_subcommand("replay", "rerun the config echoed in a report or config file");
  replay_cmd->add_option("config", config_path, "report or config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (replay_cmd->parsed()) {
      std::ifstream f(config_path);
      if (!f) throw ParseError("cannot read " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
      }
      c = RunConfig::from_json(j.contains("config") ? j["config"] : j);
    } else {
      c.command = app.get_subcommands().front()->get_name();
      apply_interval(c, interval);
      if (!t_grid.empty()) c.t_grid = parse_grid(t_grid);
      if (density_cmd->parsed()) c.T = T;
      c.s = s;
    }
    if (c.format == "both" && c.out.empty()) throw InvalidInput("--format both needs --out");
    const Report report = run(c);
    if (c.out.empty()) {
      out << (c.format == "csv" ? report.csv.str() : dump_json(report.to_json()) + "\n");
    } else {
      write_report(report, c.out, c.format);
      out << summary(report);
    }
    return report.precision_failures > 0 ? kPrecision : kOk;
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << "\n";
    return kBudget;
  } catch (const PrecisionError& e) {
    err << "precision: " << e.what() << "\n";
    return kPrecision;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace latflow::cli
