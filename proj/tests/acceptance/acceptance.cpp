// Acceptance runs. Prints one PASS/FAIL line per criterion; exit status is
// nonzero when any selected criterion fails.
//
//   acceptance            run all
//   acceptance 3 5        run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latflow/diophantine.hpp"
#include "latflow/experiments.hpp"
#include "latflow/flow.hpp"
#include "latflow/lattice.hpp"
#include "latflow/rng.hpp"
#include "oracles.hpp"

using namespace latflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  /// Printed as a separate line; does not affect the verdict.
  std::vector<std::string> info;
};

struct Criterion {
  int id;
  std::string name;
  /// Zero means no limit.
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

LineSegmentSpec rational_line(const mpq_class& a, const mpq_class& b, const mpq_class& s1, const mpq_class& s2) {
  return LineSegmentSpec(Scalar(a), Scalar(b), Scalar(s1), Scalar(s2), ModeSpec::rational());
}

LineSegmentSpec generic_line() {
  const ModeSpec mode = ModeSpec::bigfloat(256);
  return LineSegmentSpec(parse_scalar("sqrt2", mode), parse_scalar("sqrt3", mode), Scalar(0), Scalar(1), mode);
}

IntegerVec3 ivec(long p1, long p2, long q) { return {mpz_class(p1), mpz_class(p2), mpz_class(q)}; }

Outcome rational_divergence() {
  const LineSegmentSpec line = rational_line(mpq_class(1, 2), mpq_class(1, 3), 0, 1);
  int violations = 0, uncertified = 0;
  double worst = -1.0;
  for (int t = 0; t <= 8; ++t) {
    const double bound = 6.0 * std::exp(-t) + 1e-9;
    for (int j = 0; j < 100; ++j) {
      const Scalar s(mpq_class(j, 99));
      const ShortVectorResult sv = shortest_vector(LatticeBasis3::orbit(line, s, FlowTime(t)));
      if (!sv.certified) ++uncertified;
      const double l = sv.lambda1.to_double();
      if (l > bound) ++violations;
      worst = std::max(worst, l - bound);
    }
  }
  int escape_misses = 0;
  for (int t = 4; t <= 8; ++t) {
    if (escape_mass_fraction(line, FlowTime(t), 0.2, 100, 2024) != 1.0) ++escape_misses;
  }
  Outcome o;
  o.pass = violations == 0 && uncertified == 0 && escape_misses == 0;
  o.detail = "violations=" + std::to_string(violations) + " uncertified=" + std::to_string(uncertified) +
             " max(lambda1 - bound)=" + fmt("%.3g", worst) +
             " escape!=1 at t in {4..8}: " + std::to_string(escape_misses);
  return o;
}

Outcome exterior_bound() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<long> d(-100, 100);
  std::vector<IntegerVec3> ws;
  while (ws.size() < 1000) {
    IntegerVec3 w = ivec(d(rng), d(rng), d(rng));
    if (!w.is_zero()) ws.push_back(w);
  }
  const ModeSpec mode = ModeSpec::bigfloat(256);
  int violations = 0, checks = 0;
  for (const auto& [lo, hi] : {std::pair{0, 1}, std::pair{-1, 1}}) {
    const LineSegmentSpec line(parse_scalar("sqrt2", mode), parse_scalar("sqrt3", mode), Scalar(lo), Scalar(hi), mode);
    const Scalar c = ext2_constant(line);
    for (int t = 0; t <= 8; ++t) {
      const Scalar bound = c * exp_of(t, mode);
      for (const auto& w : ws) {
        ++checks;
        if (segment_sup(line, FlowTime(t), w, Representation::ext2) < bound) ++violations;
      }
    }
  }
  return {violations == 0, "checks=" + std::to_string(checks) + " violations=" + std::to_string(violations), {}};
}

Outcome liouville_profile() {
  const mpq_class lam = oracle::liouville4();
  const LineSegmentSpec line = rational_line(lam, lam, 0, 1);
  Outcome o;

  const std::vector<Scalar> Cs = {Scalar(1), Scalar(mpq_class(1, 1000)), Scalar(mpq_class(1, 1000000))};
  const auto profile = w2inf_profile(line.a(), line.b(), Cs, 1000000);
  bool all_found = true;
  std::string qs;
  for (const auto& e : profile) {
    all_found = all_found && e.witness.has_value();
    qs += (qs.empty() ? "" : ",") + (e.witness ? e.witness->q.get_str() : std::string("none"));
  }

  std::vector<double> minima;
  std::string values;
  for (const long q : {10L, 100L, 1000000L}) {
    const auto m = segment_minimum(line, FlowTime(std::log(static_cast<double>(q))), Scalar(4));
    const double v = m ? m->value.to_double() : std::nan("");
    minima.push_back(v);
    values += (values.empty() ? "" : ",") + fmt("%.6g", v);
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < minima.size(); ++k) decreasing = decreasing && minima[k] * 10.0 <= minima[k - 1];

  o.pass = all_found && decreasing;
  o.detail = "w2inf q=" + qs + " minima at t=ln q {10,1e2,1e6}: " + values +
             (decreasing ? "" : " (no factor-10 decay)");

  // Each witness vector evaluated at the time balancing its two sides,
  // t = (1/3) ln(q / residual).
  std::string info;
  for (const auto& e : profile) {
    if (!e.witness || e.witness->q == 1) continue;
    const auto& w = *e.witness;
    const double res = latflow::max(w.residual1, w.residual2).to_double();
    const double t = std::log(w.q.get_d() / res) / 3.0;
    const double sup = segment_sup(line, FlowTime(t), IntegerVec3{w.p1, w.p2, w.q}).to_double();
    info += " q=" + w.q.get_str() + " t=" + fmt("%.4g", t) + " sup=" + fmt("%.4g", sup);
  }
  o.info.push_back("witness orbit sup at balanced times:" + info);
  return o;
}

Outcome vandermonde() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long> d(-100, 100);
  int violations = 0, checks = 0;
  for (unsigned m = 1; m <= 6; ++m) {
    for (int i = 0; i < 500; ++i) {
      std::vector<mpz_class> w(m + 1);
      for (auto& x : w) x = d(rng);
      if (std::all_of(w.begin(), w.end(), [](const mpz_class& x) { return x == 0; })) w[0] = 1;
      for (int t = 0; t <= 2; ++t) {
        ++checks;
        if (!vandermonde_check(w, FlowTime(t), Scalar(0), Scalar(1)).pass) ++violations;
      }
    }
  }
  return {violations == 0, "checks=" + std::to_string(checks) + " violations=" + std::to_string(violations), {}};
}

Outcome density() {
  const mpq_class lam = oracle::liouville4();
  const LineSegmentSpec line = rational_line(lam, lam, 0, 1);
  const double T = std::log(1e6);
  const DensityProfile p = ir_density(line, Scalar(2), T, 2000000);
  const double lower = (0.4 - 0.1) * 1.0 / (1.0 + 0.4 * 1.0);
  const bool agree = std::abs(p.union_fraction - p.direct_fraction) <= 0.05;
  const bool positive = p.union_fraction > 0 && p.direct_fraction > 0;
  const bool meets = p.direct_fraction >= lower - 0.05;
  Outcome o;
  o.pass = agree && positive && meets;
  o.detail = "union=" + fmt("%.4f", p.union_fraction) + " direct=" + fmt("%.4f", p.direct_fraction) +
             " |diff|=" + fmt("%.4f", std::abs(p.union_fraction - p.direct_fraction)) + (agree ? "" : " (>0.05)") +
             " lower bound=" + fmt("%.4f", lower) + (meets ? " met" : " missed") +
             " intervals=" + std::to_string(p.intervals.size()) +
             (p.coverage_warning ? " coverage_warning" : "");
  return o;
}

struct EquidistRun {
  std::vector<TranslateSample> t5, t7;
};

const EquidistRun& equidist_run() {
  static const EquidistRun run = [] {
    const LineSegmentSpec line = generic_line();
    return EquidistRun{sample_translate(line, FlowTime(5), 1000, 42, {1.5}),
                       sample_translate(line, FlowTime(7), 1000, 42, {1.5})};
  }();
  return run;
}

std::vector<double> lambdas(const std::vector<TranslateSample>& samples) {
  std::vector<double> out;
  for (const auto& s : samples) out.push_back(s.lambda1.to_double());
  return out;
}

Outcome equidistribution() {
  const EquidistRun& r = equidist_run();
  const double ks = ks_distance(lambdas(r.t5), lambdas(r.t7));
  const double e5 = escape_fraction_of(r.t5, 0.05);
  const double e7 = escape_fraction_of(r.t7, 0.05);
  return {ks <= 0.08 && e5 <= 0.02 && e7 <= 0.02,
          "KS(t=5,t=7)=" + fmt("%.4f", ks) + " escape(0.05) t=5: " + fmt("%.4f", e5) + " t=7: " + fmt("%.4f", e7),
          {}};
}

Outcome siegel() {
  const EquidistRun& r = equidist_run();
  double sum = 0;
  for (const auto& s : r.t7) sum += static_cast<double>(s.counts.at(0));
  const double mean = sum / static_cast<double>(r.t7.size());
  const double rel = std::abs(mean - 27.0) / 27.0;
  Outcome o;
  o.detail = "mean count r=1.5 t=7: " + fmt("%.3f", mean) + " vs 27 (rel " + fmt("%.3f", rel) + ")";
  if (rel <= 0.15) {
    o.pass = true;
  } else {
    o.pass = equidistribution().pass;
    o.info.push_back(o.pass ? "flagged for investigation: outside the 15% band while criterion 6 passes"
                            : "outside the 15% band and criterion 6 fails");
  }
  return o;
}

Outcome dani() {
  const LineSegmentSpec line = generic_line();
  const double deltas[] = {0.3, 0.6, 0.9};
  int compared = 0, agree = 0, marginal = 0, solvable = 0;
  for (int i = 0; i < 200; ++i) {
    const double delta = deltas[i % 3];
    const double t = 0.5 * (1 + (i / 3) % 12);
    const Scalar s = sample_point(line, 8, static_cast<std::uint64_t>(i), 0);
    const double lambda1 = shortest_vector(LatticeBasis3::orbit(line, s, FlowTime(t))).lambda1.to_double();
    const double root = std::cbrt(delta);
    if (std::abs(lambda1 - root) <= 0.02) {
      ++marginal;
      continue;
    }
    const mpq_class sq = s.to_rational();
    const Scalar x1(sq);
    const Scalar x2(mpq_class(line.a_exact() * sq + line.b_exact()));
    const bool direct = dirichlet_direct(x1, x2, Scalar(delta), {Scalar(root * std::exp(t))}).front().solvable;
    ++compared;
    if (direct) ++solvable;
    if (direct == (lambda1 <= root)) ++agree;
  }
  const double rate = compared ? static_cast<double>(agree) / compared : 0.0;
  return {compared > 0 && rate >= 0.95,
          "agree " + std::to_string(agree) + "/" + std::to_string(compared) + " (" + fmt("%.4f", rate) +
              ") marginal=" + std::to_string(marginal) +
              " solvable=" + std::to_string(solvable),
          {}};
}

double inf_condition(const Matrix3d& b) {
  const double det = determinant(b);
  double inv = 0, norm = 0;
  for (int r = 0; r < 3; ++r) {
    double row = 0, irow = 0;
    for (int c = 0; c < 3; ++c) {
      row += std::abs(b(r, c));
      const int r1 = (c + 1) % 3, r2 = (c + 2) % 3, c1 = (r + 1) % 3, c2 = (r + 2) % 3;
      irow += std::abs((b(r1, c1) * b(r2, c2) - b(r1, c2) * b(r2, c1)) / det);
    }
    norm = std::max(norm, row);
    inv = std::max(inv, irow);
  }
  return norm * inv;
}

Outcome enumeration() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-1.0, 1.0), skew(-3.0, 3.0);
  int bases = 0, mismatches = 0, uncertified = 0;
  double worst = 0;
  while (bases < 200) {
    Matrix3d b;
    const double x = skew(rng), y = skew(rng);
    const double scale[3] = {std::exp(x), std::exp(y), std::exp(-x - y)};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b(r, c) = scale[r] * u(rng);
    double det = determinant(b);
    if (std::abs(det) < 1e-3) continue;
    if (det < 0) {
      for (int r = 0; r < 3; ++r) b(r, 0) = -b(r, 0);
      det = -det;
    }
    const double k = std::cbrt(det);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b(r, c) /= k;
    if (inf_condition(b) > 1e6) continue;
    ++bases;

    const ShortVectorResult sv = shortest_vector(b);
    if (!sv.certified) ++uncertified;
    const Matrix3d reduced = lll_reduce(b).basis;
    oracle::Mat m{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[r][c] = reduced(r, c);
    const double brute = oracle::lambda1_box(m, 25);
    const double rel = std::abs(sv.lambda1.to_double() - brute) / brute;
    worst = std::max(worst, rel);
    if (rel > 1e-10) ++mismatches;
  }
  return {mismatches == 0 && uncertified == 0,
          "bases=200 mismatches=" + std::to_string(mismatches) + " uncertified=" + std::to_string(uncertified) +
              " max rel diff=" + fmt("%.3g", worst),
          {}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "rational divergence", 10, rational_divergence},
      {2, "exterior-square lower bound", 5, exterior_bound},
      {3, "W2inf profile and orbit decay on (lambda4, lambda4)", 60, liouville_profile},
      {4, "Vandermonde bound", 5, vandermonde},
      {5, "I_R density: union vs direct grid", 0, density},
      {6, "equidistribution stability proxy", 120, equidistribution},
      {7, "Siegel mean count (external reference)", 120, siegel},
      {8, "Dani correspondence consistency", 300, dani},
      {9, "enumeration vs brute force", 30, enumeration},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0 || seconds < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << fmt("%.2f", seconds) << " s"
              << (c.limit_seconds > 0 ? ", limit " + fmt("%.0f", c.limit_seconds) + " s" : std::string())
              << (in_time ? "" : ", too slow") << "]\n";
    for (const auto& line : o.info) std::cout << "INFO criterion " << c.id << ": " << line << "\n";
    std::cout.flush();
  }
  return failures == 0 ? 0 : 1;
}
