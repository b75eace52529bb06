#pragma once

#include <gmpxx.h>

#include <array>
#include <vector>

#include "latflow/linalg.hpp"
#include "latflow/scalar.hpp"

namespace latflow {

/// The segment s -> phi_{a,b}(s), s in [s1, s2].
///
/// All four parameters are held in `mode`. Their exact values (every float is
/// a dyadic rational) are cached for residual computations.
class LineSegmentSpec {
 public:
  LineSegmentSpec(const Scalar& a, const Scalar& b, const Scalar& s1, const Scalar& s2, const ModeSpec& mode);
  /// Mode inferred from the inputs: rational if all are rational, else the
  /// widest float among them.
  LineSegmentSpec(const Scalar& a, const Scalar& b, const Scalar& s1, const Scalar& s2);

  const Scalar& a() const { return a_; }
  const Scalar& b() const { return b_; }
  const Scalar& s1() const { return s1_; }
  const Scalar& s2() const { return s2_; }
  const ModeSpec& mode() const { return mode_; }
  /// Mode used for exponentials: the line's float mode, bigfloat for rationals.
  ModeSpec eval_mode() const { return mode_.float_mode(); }

  const mpq_class& a_exact() const { return aq_; }
  const mpq_class& b_exact() const { return bq_; }
  const mpq_class& s1_exact() const { return s1q_; }
  const mpq_class& s2_exact() const { return s2q_; }

  /// A copy with a different interval, same (a, b) and mode.
  LineSegmentSpec with_interval(const Scalar& s1, const Scalar& s2) const;

 private:
  Scalar a_, b_, s1_, s2_;
  ModeSpec mode_;
  mpq_class aq_, bq_, s1q_, s2q_;
};

struct FlowTime {
  double t = 0.0;

  FlowTime() = default;
  explicit FlowTime(double value);
};

/// g_t = diag(e^{2t}, e^{-t}, e^{-t}) kept as its log-entries.
struct DiagonalFlow {
  std::array<double, 3> log_entries{};

  double log_det() const { return log_entries[0] + log_entries[1] + log_entries[2]; }
  /// Dense matrix with entries e^{log_entries} in `mode` (a float mode).
  Matrix3 matrix(const ModeSpec& mode) const;
};

DiagonalFlow g(const FlowTime& t);
/// diag(x^2, 1/x, 1/x) for a symbolic scale x standing in for e^t. Exact when
/// x is rational.
Matrix3 g_symbolic(const Scalar& x);

Matrix3 phi(const LineSegmentSpec& line, const Scalar& s);
/// The unipotent (1, r, a r; 0, 1, 0; 0, 0, 1).
Matrix3 unipotent_w(const LineSegmentSpec& line, const Scalar& r);

/// g_t phi(s) v for an integer v, kept in the affine form
///   (e^{2t} (intercept + slope * s), e^{-t} p2, e^{-t} q)
/// with intercept = b q + p1 and slope = a q + p2 held exactly (rational
/// lines) or correctly rounded to the line's mode.
struct SegmentOrbitPoint {
  Scalar intercept;
  Scalar slope;
  Scalar s;
  /// e^{t}, or the symbolic scale it was built from.
  Scalar scale;
  IntegerVec3 v;
  Vec3<Scalar> coords;

  Scalar first_at(const Scalar& at) const;
  Scalar sup_norm() const;
};

enum class Representation { standard, ext2 };

SegmentOrbitPoint flow_standard(const LineSegmentSpec& line, const Scalar& s, const FlowTime& t,
                                const IntegerVec3& v);
SegmentOrbitPoint flow_standard_scaled(const LineSegmentSpec& line, const Scalar& s, const Scalar& scale,
                                       const IntegerVec3& v);

/// g_t phi(s) acting on the exterior square; w = (p, q, r) in the basis
/// (e12, e23, e13), result in the same basis.
Vec3<Scalar> flow_ext2(const LineSegmentSpec& line, const Scalar& s, const FlowTime& t, const IntegerVec3& w);

/// sup over s in [s1, s2] of the sup-norm of g_t phi(s) v. Every coordinate
/// is affine in s, so the maximum sits at an endpoint.
Scalar segment_sup(const LineSegmentSpec& line, const FlowTime& t, const IntegerVec3& v,
                   Representation rep = Representation::standard);

/// min{(s2 - s1)/2, (s2 - s1)/(|s1| + |s2|), 1}.
Scalar ext2_constant(const Scalar& s1, const Scalar& s2);
Scalar ext2_constant(const LineSegmentSpec& line);

struct VandermondeCheck {
  Scalar lhs;
  Scalar rhs;
  bool pass = false;
};

/// Compares max_j |sum_k w_k tau_j^k| on the grid tau_j = s1 + (j/m)(s2 - s1)
/// against (C_I m)^{-m} max_k |w_k| with C_I = (1 + max|s_i|)/(s2 - s1). Both
/// sides are reported multiplied by e^{mt}; the comparison itself is exact.
VandermondeCheck vandermonde_check(const std::vector<mpz_class>& w, const FlowTime& t, const Scalar& s1,
                                   const Scalar& s2);

}  // namespace latflow
