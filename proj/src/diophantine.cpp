#include "latflow/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "latflow/error.hpp"
#include "latflow/parallel.hpp"
#include "residual.hpp"

namespace latflow {

namespace {

using detail::DoubleDouble;

constexpr mpfr_prec_t kBits = 256;

void check_q_max(std::uint64_t q_max) {
  if (q_max < 1) throw InvalidInput("q_max must be at least 1");
  if (q_max > kQMaxLimit) throw BudgetError("q_max above " + std::to_string(kQMaxLimit) + " is not scanned");
}

mpq_class positive_rational(const Scalar& x, const char* what) {
  const mpq_class v = x.to_rational();
  if (sgn(v) <= 0) throw InvalidInput(std::string(what) + " must be positive");
  return v;
}

struct Exact {
  detail::ExactResidual r1, r2;
  mpq_class worst() const { return std::max(r1.residual, r2.residual); }
};

Exact exact_pair(const mpq_class& a, const mpq_class& b, const mpz_class& q) {
  return {detail::exact_residual(b, q), detail::exact_residual(a, q)};
}

// Approximate max residual of q (b, a) with an absolute error bound.
struct Approx {
  double value;
  double err;
};

class PairResidual {
 public:
  PairResidual(const mpq_class& a, const mpq_class& b) : a_(DoubleDouble::of(a)), b_(DoubleDouble::of(b)) {}

  Approx operator()(double q) const {
    const auto sb = detail::split(b_, q);
    const auto sa = detail::split(a_, q);
    return {std::max(std::abs(sb.r), std::abs(sa.r)), std::max(sb.err, sa.err)};
  }

 private:
  DoubleDouble a_, b_;
};

enum class Verdict { yes, no, unsure };

// Compares value (+- err) against a threshold known to relative `rel`.
Verdict decide(const Approx& x, double threshold, double rel) {
  if (x.value + x.err < threshold * (1 - rel)) return Verdict::yes;
  if (x.value - x.err > threshold * (1 + rel)) return Verdict::no;
  return Verdict::unsure;
}

DiophantineWitness make_witness(const Exact& e, const mpz_class& q, Scalar bound, WitnessClass tag) {
  return {e.r1.p, e.r2.p, q, Scalar(e.r1.residual), Scalar(e.r2.residual), std::move(bound), tag};
}

// Scans q in [q_lo, q_hi]. `threshold(q)` approximates the bound to relative
// 1e-12; `exact(q, worst)` decides it exactly. Stops when `emit` says so.
template <class Threshold, class ExactTest, class Emit>
void scan(const mpq_class& a, const mpq_class& b, std::uint64_t q_lo, std::uint64_t q_hi, Threshold threshold,
          ExactTest exact, Emit emit) {
  const PairResidual fast(a, b);
  for (std::uint64_t qi = q_lo; qi <= q_hi; ++qi) {
    const auto q = static_cast<double>(qi);
    const Verdict v = decide(fast(q), threshold(q), 1e-12);
    if (v == Verdict::no) continue;
    const mpz_class qz(static_cast<unsigned long>(qi));
    const Exact e = exact_pair(a, b, qz);
    if (v == Verdict::unsure && !exact(qz, e.worst())) continue;
    if (!emit(qz, e)) return;
  }
}

bool w2_exact(const mpq_class& C, const mpz_class& q, const mpq_class& worst) { return worst * q * q <= C; }

struct EpsTest {
  mpq_class eps;
  bool rational_path;
  BigFloat exponent;

  explicit EpsTest(const mpq_class& e)
      : eps(e), rational_path(e.get_den() <= 64), exponent(mpq_class(e + 2), kBits) {}

  bool operator()(const mpz_class& q, const mpq_class& worst) const {
    if (sgn(worst) == 0) return true;
    if (rational_path) {
      // worst^d q^{2d + n} <= 1 with eps = n/d
      const unsigned long d = eps.get_den().get_ui();
      const unsigned long n = eps.get_num().get_ui();
      mpz_class lhs, rhs, qp;
      mpz_pow_ui(lhs.get_mpz_t(), worst.get_num_mpz_t(), d);
      mpz_pow_ui(qp.get_mpz_t(), q.get_mpz_t(), 2 * d + n);
      lhs *= qp;
      mpz_pow_ui(rhs.get_mpz_t(), worst.get_den_mpz_t(), d);
      return lhs <= rhs;
    }
    const BigFloat scaled = BigFloat(worst, kBits) * pow(BigFloat(q, kBits), exponent);
    return compare(scaled, mpq_class(1)) <= 0;
  }

  Scalar bound(const mpz_class& q) const {
    if (rational_path && eps.get_den() == 1) {
      mpz_class qp;
      mpz_pow_ui(qp.get_mpz_t(), q.get_mpz_t(), eps.get_num().get_ui() + 2);
      return Scalar(mpq_class(1, qp));
    }
    return Scalar(pow(BigFloat(q, kBits), -exponent));
  }
};

struct Push {
  WitnessSearch& out;
  bool operator()(DiophantineWitness w) {
    ++out.count;
    if (out.witnesses.size() < kWitnessLimit) {
      out.witnesses.push_back(std::move(w));
    } else {
      out.truncated = true;
    }
    return true;
  }
};

}  // namespace

NearestResiduals nearest_residuals(const Scalar& a, const Scalar& b, const mpz_class& q) {
  if (q < 1) throw InvalidInput("nearest_residuals needs q >= 1");
  const Exact e = exact_pair(a.to_rational(), b.to_rational(), q);
  return {e.r1.p, e.r2.p, Scalar(e.r1.residual), Scalar(e.r2.residual)};
}

std::string to_string(WitnessClass c) {
  switch (c) {
    case WitnessClass::w2: return "W2";
    case WitnessClass::w2eps: return "W2eps";
    case WitnessClass::w2inf: return "W2inf";
  }
  return "?";
}

WitnessSearch w2_witness_search(const Scalar& a, const Scalar& b, const Scalar& C, std::uint64_t q_max) {
  check_q_max(q_max);
  const mpq_class c = positive_rational(C, "C");
  const double cd = c.get_d();
  WitnessSearch out;
  Push push{out};
  scan(
      a.to_rational(), b.to_rational(), 1, q_max, [&](double q) { return cd / (q * q); },
      [&](const mpz_class& q, const mpq_class& worst) { return w2_exact(c, q, worst); },
      [&](const mpz_class& q, const Exact& e) {
        return push(make_witness(e, q, Scalar(mpq_class(c / (q * q))), WitnessClass::w2));
      });
  return out;
}

WitnessSearch w2eps_witness_search(const Scalar& a, const Scalar& b, const Scalar& eps, std::uint64_t q_max) {
  check_q_max(q_max);
  const EpsTest test(positive_rational(eps, "eps"));
  const double exponent = 2.0 + test.eps.get_d();
  WitnessSearch out;
  Push push{out};
  scan(
      a.to_rational(), b.to_rational(), 1, q_max, [&](double q) { return std::exp(-exponent * std::log(q)); },
      [&](const mpz_class& q, const mpq_class& worst) { return test(q, worst); },
      [&](const mpz_class& q, const Exact& e) {
        return push(make_witness(e, q, test.bound(q), WitnessClass::w2eps));
      });
  return out;
}

std::vector<W2InfEntry> w2inf_profile(const Scalar& a, const Scalar& b, const std::vector<Scalar>& C_list,
                                      std::uint64_t q_max) {
  check_q_max(q_max);
  std::vector<mpq_class> cs;
  for (const Scalar& C : C_list) {
    cs.push_back(positive_rational(C, "C"));
    if (cs.size() > 1 && !(cs.back() < cs[cs.size() - 2])) throw InvalidInput("C_list must be strictly descending");
  }
  const mpq_class aq = a.to_rational();
  const mpq_class bq = b.to_rational();
  std::vector<W2InfEntry> out;
  std::uint64_t start = 1;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    W2InfEntry entry{C_list[i], std::nullopt};
    const mpq_class& c = cs[i];
    const double cd = c.get_d();
    if (start <= q_max) {
      scan(
          aq, bq, start, q_max, [&](double q) { return cd / (q * q); },
          [&](const mpz_class& q, const mpq_class& worst) { return w2_exact(c, q, worst); },
          [&](const mpz_class& q, const Exact& e) {
            entry.witness = make_witness(e, q, Scalar(mpq_class(c / (q * q))), WitnessClass::w2inf);
            return false;
          });
    }
    // A witness for a smaller C is a witness for this one, so the next scan
    // resumes here.
    start = entry.witness ? entry.witness->q.get_ui() : q_max + 1;
    out.push_back(std::move(entry));
  }
  return out;
}

std::optional<RationalCertificate> rational_certificate(const Scalar& a, const Scalar& b) {
  if (a.mode() != ScalarMode::rational || b.mode() != ScalarMode::rational) {
    throw NotApplicable("rational certificate needs exact rational inputs");
  }
  const mpq_class& aq = a.as_rational();
  const mpq_class& bq = b.as_rational();
  mpz_class q;
  mpz_lcm(q.get_mpz_t(), aq.get_den_mpz_t(), bq.get_den_mpz_t());
  const mpq_class p2 = aq * q;
  const mpq_class p1 = bq * q;
  return RationalCertificate{p1.get_num(), p2.get_num(), q};
}

Scalar r1_from(const LineSegmentSpec& line, const Scalar& R) {
  return Scalar(mpq_class(endpoint_inverse_norm(line).to_rational() * positive_rational(R, "R")));
}

std::optional<EqInterval> eq_interval(const mpz_class& q, const Scalar& a, const Scalar& b, const Scalar& R,
                                      const Scalar& R1) {
  if (q < 1) throw InvalidInput("eq_interval needs q >= 1");
  const mpq_class r = positive_rational(R, "R");
  const mpq_class r1 = positive_rational(R1, "R1");
  if (r1 < r) throw InvalidInput("eq_interval needs R1 >= R");
  const Exact e = exact_pair(a.to_rational(), b.to_rational(), q);
  const mpq_class worst = e.worst();
  if (!(worst * q * q < r1 * r * r)) return std::nullopt;
  EqInterval out;
  out.q = q;
  out.p1 = e.r1.p;
  out.p2 = e.r2.p;
  out.residual = Scalar(worst);
  const BigFloat lq = log(BigFloat(q, kBits));
  out.lo = std::max(0.0, (lq - log(BigFloat(r, kBits))).to_double());
  if (sgn(worst) == 0) {
    out.hi = std::numeric_limits<double>::infinity();
    out.unbounded = true;
  } else {
    const BigFloat half(0.5, kBits);
    out.hi = (half * (log(BigFloat(r1, kBits)) - log(BigFloat(worst, kBits)))).to_double();
  }
  if (!(out.hi > out.lo)) return std::nullopt;
  return out;
}

DensityProfile ir_density(const LineSegmentSpec& line, const Scalar& R, double T, std::uint64_t q_max,
                          double grid_step) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("density horizon T must be positive");
  if (!(grid_step > 0.0 && grid_step <= kDensityStep)) throw InvalidInput("density grid step must lie in (0, 0.01]");
  check_q_max(q_max);
  DensityProfile out;
  out.R = R;
  out.R1 = r1_from(line, R);
  out.T = T;
  out.q_max = q_max;

  const mpq_class aq = line.a_exact();
  const mpq_class bq = line.b_exact();
  const mpq_class rr = R.to_rational();
  const mpq_class limit = out.R1.to_rational() * rr * rr;
  const double limit_d = limit.get_d();
  scan(
      aq, bq, 1, q_max, [&](double q) { return limit_d / (q * q); },
      [&](const mpz_class& q, const mpq_class& worst) { return worst * q * q < limit; },
      [&](const mpz_class& q, const Exact& e) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), e.r1.p.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.r2.p.get_mpz_t());
        if (g != 1) return true;
        if (auto interval = eq_interval(q, line.a(), line.b(), R, out.R1)) {
          out.rational_hit = out.rational_hit || interval->unbounded;
          out.intervals.push_back(std::move(*interval));
        }
        return true;
      });

  std::vector<std::pair<double, double>> pieces;
  for (const auto& e : out.intervals) {
    const double lo = std::min(e.lo, T);
    const double hi = std::min(e.hi, T);
    if (hi > lo) pieces.emplace_back(lo, hi);
  }
  std::sort(pieces.begin(), pieces.end());
  double covered = 0.0, end = 0.0;
  for (const auto& [lo, hi] : pieces) {
    if (hi <= end) continue;
    covered += hi - std::max(lo, end);
    end = hi;
  }
  out.union_fraction = covered / T;
  out.coverage_warning = std::log(static_cast<double>(q_max)) - std::log(rr.get_d()) < T;

  const auto steps = static_cast<std::size_t>(std::ceil(T / grid_step - 1e-12));
  out.grid_step = T / static_cast<double>(steps);
  out.grid.resize(steps);
  out.in_IR.assign(steps, 0);
  parallel_for(steps, [&](std::size_t k) {
    const double t = (static_cast<double>(k) + 0.5) * out.grid_step;
    out.grid[k] = t;
    out.in_IR[k] = segment_below(line, FlowTime(t), R) ? 1 : 0;
  });
  out.direct_fraction =
      static_cast<double>(std::count(out.in_IR.begin(), out.in_IR.end(), 1)) / static_cast<double>(steps);
  return out;
}

std::vector<DirichletVerdict> dirichlet_direct(const Scalar& x1, const Scalar& x2, const Scalar& delta,
                                               const std::vector<Scalar>& T_list) {
  const mpq_class d = delta.to_rational();
  if (!(sgn(d) > 0 && d < 1)) throw InvalidInput("delta must lie in (0, 1)");
  const mpq_class e1 = x1.to_rational();
  const mpq_class e2 = x2.to_rational();
  const DoubleDouble f1 = DoubleDouble::of(e1);
  const DoubleDouble f2 = DoubleDouble::of(e2);
  std::vector<DirichletVerdict> out;
  for (const Scalar& T : T_list) {
    const mpq_class tq = T.to_rational();
    if (sgn(tq) <= 0) throw InvalidInput("Dirichlet horizons must be positive");
    if (tq > kDirichletTMax) throw BudgetError("Dirichlet horizon above 1000 is not scanned");
    const mpq_class threshold = d / (tq * tq);
    const double threshold_d = threshold.get_d();
    mpz_class nz;
    mpz_fdiv_q(nz.get_mpz_t(), tq.get_num_mpz_t(), tq.get_den_mpz_t());
    const long N = nz.get_si();

    std::vector<detail::SplitProduct> second(static_cast<std::size_t>(2 * N + 1));
    for (long q2 = -N; q2 <= N; ++q2) second[static_cast<std::size_t>(q2 + N)] = detail::split(f2, static_cast<double>(q2));

    DirichletVerdict verdict;
    verdict.T = T;
    const auto exact_at = [&](long q1, long q2) {
      const mpq_class y = e1 * q1 + e2 * q2;
      const mpz_class p = detail::nearest_integer(mpq_class(-y));
      return std::pair{p, mpq_class(abs(mpq_class(y + p)))};
    };
    for (long q1 = 0; q1 <= N && !verdict.solvable; ++q1) {
      const detail::SplitProduct first = detail::split(f1, static_cast<double>(q1));
      for (long q2 = q1 == 0 ? 1 : -N; q2 <= N; ++q2) {
        const detail::SplitProduct& s2 = second[static_cast<std::size_t>(q2 + N)];
        const double r = first.r + s2.r;
        const Approx dist{std::abs(r - std::nearbyint(r)), first.err + s2.err + 0x1p-52};
        const Verdict v = decide(dist, threshold_d, 1e-15);
        if (v == Verdict::no) continue;
        auto [p, residual] = exact_at(q1, q2);
        if (residual > threshold) continue;
        verdict.solvable = true;
        verdict.solution = IntegerVec3{mpz_class(q1), mpz_class(q2), p};
        verdict.residual = Scalar(residual);
        break;
      }
    }
    out.push_back(std::move(verdict));
  }
  return out;
}

}  // namespace latflow
