#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latflow/experiments.hpp"
#include "latflow/flow.hpp"
#include "latflow/scalar.hpp"

namespace latflow {

struct NearestResiduals {
  mpz_class p1;
  mpz_class p2;
  /// |q b + p1| and |q a + p2|, exact.
  Scalar residual1;
  Scalar residual2;
};

/// p1, p2 nearest to -q b, -q a (ties to even). Float inputs are treated as
/// the dyadic rationals they store.
NearestResiduals nearest_residuals(const Scalar& a, const Scalar& b, const mpz_class& q);

enum class WitnessClass { w2, w2eps, w2inf };
std::string to_string(WitnessClass c);

struct DiophantineWitness {
  mpz_class p1, p2, q;
  Scalar residual1, residual2;
  /// The right-hand side the residuals were tested against.
  Scalar bound;
  WitnessClass tag = WitnessClass::w2;
};

constexpr std::size_t kWitnessLimit = 100'000;
constexpr std::uint64_t kQMaxLimit = 1'000'000'000;

struct WitnessSearch {
  /// The first kWitnessLimit witnesses in increasing q.
  std::vector<DiophantineWitness> witnesses;
  std::uint64_t count = 0;
  bool truncated = false;
};

/// Every q in [1, q_max] with max(|qb + p1|, |qa + p2|) <= C q^-2.
WitnessSearch w2_witness_search(const Scalar& a, const Scalar& b, const Scalar& C, std::uint64_t q_max);

/// Every q in [1, q_max] with max(|qb + p1|, |qa + p2|) <= q^-(2 + eps).
/// Exact when eps is rational with denominator <= 64, else 256-bit.
WitnessSearch w2eps_witness_search(const Scalar& a, const Scalar& b, const Scalar& eps, std::uint64_t q_max);

struct W2InfEntry {
  Scalar C;
  /// Smallest witness q for this C, if any below q_max.
  std::optional<DiophantineWitness> witness;
};

/// C_list must be positive and strictly descending.
std::vector<W2InfEntry> w2inf_profile(const Scalar& a, const Scalar& b, const std::vector<Scalar>& C_list,
                                      std::uint64_t q_max);

struct RationalCertificate {
  mpz_class p1, p2, q;
  /// (-p1, -p2, q): phi(s) of it does not depend on s.
  IntegerVec3 annihilator() const { return {-p1, -p2, q}; }
};

/// (p1, p2, q) with a = p2/q, b = p1/q and q minimal. Throws NotApplicable
/// for float inputs.
std::optional<RationalCertificate> rational_certificate(const Scalar& a, const Scalar& b);

/// R1 = ||(1 s1; 1 s2)^{-1}||_inf R.
Scalar r1_from(const LineSegmentSpec& line, const Scalar& R);

struct EqInterval {
  mpz_class q;
  mpz_class p1, p2;
  /// max(|qb + p1|, |qa + p2|), exact.
  Scalar residual;
  double lo = 0.0;
  /// +infinity when the residual is zero.
  double hi = 0.0;
  bool unbounded = false;
};

/// (log q - log R, (log R1 - log <q(b,a)>) / 2) intersected with [0, inf).
/// Empty iff <q(b,a)> >= R1 R^2 q^-2, decided exactly.
std::optional<EqInterval> eq_interval(const mpz_class& q, const Scalar& a, const Scalar& b, const Scalar& R,
                                      const Scalar& R1);

struct DensityProfile {
  Scalar R, R1;
  double T = 0.0;
  std::uint64_t q_max = 0;
  /// Nonempty E_q for primitive (p1, p2, q), q in [1, q_max].
  std::vector<EqInterval> intervals;
  /// |union of E_q within [0, T]| / T.
  double union_fraction = 0.0;
  /// Share of grid midpoints t with some v of sup-norm < R over the segment.
  double direct_fraction = 0.0;
  double grid_step = 0.0;
  std::vector<double> grid;
  std::vector<char> in_IR;
  /// E_q with q > q_max may still meet [0, T].
  bool coverage_warning = false;
  /// Some E_q is unbounded (zero residual); it is clipped at T.
  bool rational_hit = false;
};

constexpr double kDensityStep = 0.01;

DensityProfile ir_density(const LineSegmentSpec& line, const Scalar& R, double T, std::uint64_t q_max,
                          double grid_step = kDensityStep);

struct DirichletVerdict {
  Scalar T;
  bool solvable = false;
  /// A solution (q1, q2, p) when solvable.
  std::optional<IntegerVec3> solution;
  std::optional<Scalar> residual;
};

constexpr double kDirichletTMax = 1000.0;

/// For each T: is |x1 q1 + x2 q2 + p| <= delta T^-2 solvable with
/// 0 < ||(q1, q2)||_inf <= T? Exhaustive; T > 1000 throws BudgetError.
std::vector<DirichletVerdict> dirichlet_direct(const Scalar& x1, const Scalar& x2, const Scalar& delta,
                                               const std::vector<Scalar>& T_list);

}  // namespace latflow
