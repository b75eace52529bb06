#include "latflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "latflow/error.hpp"

namespace latflow {

namespace {

ModeSpec infer_mode(std::initializer_list<const Scalar*> xs) {
  ModeSpec out = ModeSpec::rational();
  for (const Scalar* x : xs) {
    if (x->mode() == ScalarMode::bigfloat) {
      if (out.kind != ScalarMode::bigfloat || x->bits() > out.bits) out = ModeSpec::bigfloat(x->bits());
    } else if (x->mode() == ScalarMode::f64 && out.kind == ScalarMode::rational) {
      out = ModeSpec::f64();
    }
  }
  return out;
}

// Mode of a value built from line data and an external parameter.
ModeSpec with_param(const ModeSpec& line_mode, const Scalar& param) {
  if (param.is_rational()) return line_mode;
  if (line_mode.kind == ScalarMode::rational) return param.spec();
  if (param.mode() == ScalarMode::bigfloat && (line_mode.kind == ScalarMode::f64 || param.bits() > line_mode.bits)) {
    return param.spec();
  }
  return line_mode;
}

Scalar exact_in(const mpq_class& q, const ModeSpec& mode) { return Scalar(q).convert(mode); }

void require_nonzero(const IntegerVec3& v) {
  if (v.is_zero()) throw InvalidInput("zero vector");
}

mpq_class affine_sup(const mpq_class& c0, const mpq_class& c1, const LineSegmentSpec& line) {
  const mpq_class at1 = abs(mpq_class(c0 + c1 * line.s1_exact()));
  const mpq_class at2 = abs(mpq_class(c0 + c1 * line.s2_exact()));
  return at1 < at2 ? at2 : at1;
}

}  // namespace

LineSegmentSpec::LineSegmentSpec(const Scalar& a, const Scalar& b, const Scalar& s1, const Scalar& s2,
                                 const ModeSpec& mode)
    : a_(a.convert(mode)),
      b_(b.convert(mode)),
      s1_(s1.convert(mode)),
      s2_(s2.convert(mode)),
      mode_(mode),
      aq_(a_.to_rational()),
      bq_(b_.to_rational()),
      s1q_(s1_.to_rational()),
      s2q_(s2_.to_rational()) {
  if (!(s1q_ < s2q_)) throw InvalidInput("segment needs s1 < s2");
}

LineSegmentSpec::LineSegmentSpec(const Scalar& a, const Scalar& b, const Scalar& s1, const Scalar& s2)
    : LineSegmentSpec(a, b, s1, s2, infer_mode({&a, &b, &s1, &s2})) {}

LineSegmentSpec LineSegmentSpec::with_interval(const Scalar& s1, const Scalar& s2) const {
  return LineSegmentSpec(a_, b_, s1, s2, mode_);
}

FlowTime::FlowTime(double value) : t(value) {
  if (!std::isfinite(value)) throw InvalidInput("flow time must be finite");
}

Matrix3 DiagonalFlow::matrix(const ModeSpec& mode) const {
  const ModeSpec fm = mode.float_mode();
  return Matrix3::diagonal(exp_of(log_entries[0], fm), exp_of(log_entries[1], fm), exp_of(log_entries[2], fm));
}

DiagonalFlow g(const FlowTime& t) { return DiagonalFlow{{2.0 * t.t, -t.t, -t.t}}; }

Matrix3 g_symbolic(const Scalar& x) {
  if (x.sign() <= 0) throw InvalidInput("flow scale must be positive");
  const Scalar inv = Scalar(1) / x;
  return Matrix3::diagonal(x * x, inv, inv);
}

Matrix3 phi(const LineSegmentSpec& line, const Scalar& s) {
  Matrix3 out = Matrix3::identity();
  out(0, 1) = s;
  out(0, 2) = line.a() * s + line.b();
  return out;
}

Matrix3 unipotent_w(const LineSegmentSpec& line, const Scalar& r) {
  Matrix3 out = Matrix3::identity();
  out(0, 1) = r;
  out(0, 2) = line.a() * r;
  return out;
}

Scalar SegmentOrbitPoint::first_at(const Scalar& at) const { return scale * scale * (intercept + slope * at); }

Scalar SegmentOrbitPoint::sup_norm() const { return max(abs(coords[0]), max(abs(coords[1]), abs(coords[2]))); }

SegmentOrbitPoint flow_standard_scaled(const LineSegmentSpec& line, const Scalar& s, const Scalar& scale,
                                       const IntegerVec3& v) {
  require_nonzero(v);
  if (scale.sign() <= 0) throw InvalidInput("flow scale must be positive");
  const mpq_class c0 = line.b_exact() * v.q + v.p1;
  const mpq_class c1 = line.a_exact() * v.q + v.p2;
  SegmentOrbitPoint out;
  out.intercept = exact_in(c0, line.mode());
  out.slope = exact_in(c1, line.mode());
  out.s = s;
  out.scale = scale;
  out.v = v;
  const ModeSpec m = with_param(line.mode(), s);
  const Scalar first = exact_in(mpq_class(c0 + c1 * s.to_rational()), m);
  out.coords = {scale * scale * first, Scalar(v.p2) / scale, Scalar(v.q) / scale};
  return out;
}

SegmentOrbitPoint flow_standard(const LineSegmentSpec& line, const Scalar& s, const FlowTime& t,
                                const IntegerVec3& v) {
  return flow_standard_scaled(line, s, exp_of(t.t, with_param(line.mode(), s).float_mode()), v);
}

Vec3<Scalar> flow_ext2(const LineSegmentSpec& line, const Scalar& s, const FlowTime& t, const IntegerVec3& w) {
  require_nonzero(w);
  const mpq_class& p = w.p1;
  const mpq_class& q = w.p2;
  const mpq_class& r = w.q;
  const mpq_class sq = s.to_rational();
  const ModeSpec m = with_param(line.mode(), s);
  const mpq_class first = p - (line.a_exact() * sq + line.b_exact()) * q;
  const mpq_class third = sq * q + r;
  if (t.t == 0.0) return {exact_in(first, m), exact_in(q, m), exact_in(third, m)};
  const ModeSpec fm = m.float_mode();
  const Scalar up = exp_of(t.t, fm);
  const Scalar down = exp_of(-2.0 * t.t, fm);
  return {up * exact_in(first, fm), down * exact_in(q, fm), up * exact_in(third, fm)};
}

Scalar segment_sup(const LineSegmentSpec& line, const FlowTime& t, const IntegerVec3& v, Representation rep) {
  require_nonzero(v);
  const ModeSpec fm = line.eval_mode();
  if (rep == Representation::standard) {
    const mpq_class c0 = line.b_exact() * v.q + v.p1;
    const mpq_class c1 = line.a_exact() * v.q + v.p2;
    const Scalar expanding = exp_of(2.0 * t.t, fm) * exact_in(affine_sup(c0, c1, line), fm);
    const mpz_class tail = std::max<mpz_class>(abs(v.p2), abs(v.q));
    const Scalar contracting = exp_of(-t.t, fm) * exact_in(mpq_class(tail), fm);
    return max(expanding, contracting);
  }
  // (p, q, r) = (v.p1, v.p2, v.q): first = (p - b q) - a q s, third = r + q s.
  const mpq_class p(v.p1), q(v.p2), r(v.q);
  const mpq_class first = std::max(affine_sup(p - line.b_exact() * q, -line.a_exact() * q, line), affine_sup(r, q, line));
  const Scalar expanding = exp_of(t.t, fm) * exact_in(first, fm);
  const Scalar contracting = exp_of(-2.0 * t.t, fm) * exact_in(abs(q), fm);
  return max(expanding, contracting);
}

Scalar ext2_constant(const Scalar& s1, const Scalar& s2) {
  if (!(s1 < s2)) throw InvalidInput("interval needs s1 < s2");
  const Scalar width = s2 - s1;
  Scalar out = min(width / Scalar(2), width / (abs(s1) + abs(s2)));
  return min(out, Scalar(1));
}

Scalar ext2_constant(const LineSegmentSpec& line) { return ext2_constant(line.s1(), line.s2()); }

VandermondeCheck vandermonde_check(const std::vector<mpz_class>& w, const FlowTime& t, const Scalar& s1,
                                   const Scalar& s2) {
  if (w.size() < 2) throw InvalidInput("vandermonde_check needs degree m >= 1");
  if (std::all_of(w.begin(), w.end(), [](const mpz_class& x) { return x == 0; })) {
    throw InvalidInput("all-zero coefficient vector");
  }
  const mpq_class lo = s1.to_rational();
  const mpq_class hi = s2.to_rational();
  if (!(lo < hi)) throw InvalidInput("interval needs s1 < s2");
  const unsigned m = static_cast<unsigned>(w.size() - 1);
  const mpq_class width = hi - lo;

  mpq_class lhs0 = 0;
  for (unsigned j = 0; j <= m; ++j) {
    const mpq_class tau = lo + mpq_class(j, m) * width;
    mpq_class acc = 0;  // Horner
    for (auto k = w.rbegin(); k != w.rend(); ++k) acc = acc * tau + *k;
    lhs0 = std::max(lhs0, mpq_class(abs(acc)));
  }

  mpz_class wmax = 0;
  for (const auto& x : w) wmax = std::max(wmax, mpz_class(abs(x)));
  const mpq_class ci = (1 + std::max(mpq_class(abs(lo)), mpq_class(abs(hi)))) / width;
  mpq_class base = ci * m;
  mpq_class denom = 1;
  for (unsigned k = 0; k < m; ++k) denom *= base;
  const mpq_class rhs0 = mpq_class(wmax) / denom;

  VandermondeCheck out;
  out.pass = lhs0 >= rhs0;
  if (t.t == 0.0) {
    out.lhs = Scalar(lhs0);
    out.rhs = Scalar(rhs0);
  } else {
    const Scalar growth = exp_of(static_cast<double>(m) * t.t, ModeSpec::bigfloat());
    out.lhs = growth * Scalar(lhs0);
    out.rhs = growth * Scalar(rhs0);
  }
  return out;
}

}  // namespace latflow
