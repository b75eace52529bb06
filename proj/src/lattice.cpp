#include "latflow/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "latflow/error.hpp"

namespace latflow {

namespace {

constexpr mpfr_prec_t kEscalationBits = 256;
constexpr double kDynamicRangeLimit = 1e12;
constexpr int kRefinePasses = 16;
constexpr double kRadiusSlack = 1.0 + 1e-9;

using ExactMatrix = Mat3<mpq_class>;
using IVec = std::array<std::int64_t, 3>;

template <class R>
R lift(double x);
template <>
double lift<double>(double x) {
  return x;
}
template <>
BigFloat lift<BigFloat>(double x) {
  return BigFloat(x, kEscalationBits);
}

std::int64_t round_int(double x) {
  if (!(std::abs(x) < 4.0e18)) throw PrecisionError("LLL coefficient out of 64-bit range");
  return static_cast<std::int64_t>(std::nearbyint(x));
}
std::int64_t round_int(const BigFloat& x) { return to_int64(x.round_half_even()); }
std::int64_t floor_int(double x) {
  if (!(std::abs(x) < 4.0e18)) throw BudgetError("enumeration bound out of 64-bit range");
  return static_cast<std::int64_t>(std::floor(x));
}
std::int64_t floor_int(const BigFloat& x) { return to_int64(x.floor()); }
std::int64_t ceil_int(double x) { return -floor_int(-x); }
std::int64_t ceil_int(const BigFloat& x) { return -floor_int(-x); }
double to_d(double x) { return x; }
double to_d(const BigFloat& x) { return x.to_double(); }

std::int64_t checked_mul_add(std::int64_t acc, std::int64_t a, std::int64_t b) {
  std::int64_t prod = 0;
  std::int64_t sum = 0;
  if (__builtin_mul_overflow(a, b, &prod) || __builtin_add_overflow(acc, prod, &sum)) {
    throw PrecisionError("integer transform overflowed 64 bits");
  }
  return sum;
}

IntMatrix3 int_mul(const IntMatrix3& a, const IntMatrix3& b) {
  IntMatrix3 out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::int64_t acc = 0;
      for (int k = 0; k < 3; ++k) acc = checked_mul_add(acc, a(r, k), b(k, c));
      out(r, c) = acc;
    }
  }
  return out;
}

ExactMatrix exact_times(const ExactMatrix& u, const IntMatrix3& t) {
  ExactMatrix out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      mpq_class acc = 0;
      for (int k = 0; k < 3; ++k) {
        if (t(k, c) != 0) acc += u(r, k) * mpq_class(static_cast<long>(t(k, c)));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

ExactMatrix exact_of(const Matrix3& m) {
  ExactMatrix out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = m.m[i].to_rational();
  return out;
}

template <class R>
using Col = std::array<R, 3>;

template <class R>
struct Basis {
  std::array<Col<R>, 3> b;
};

template <class R>
R dot(const Col<R>& x, const Col<R>& y) {
  return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

template <class R>
struct Gso {
  R mu[3][3];
  R sq[3];
};

template <class R>
Gso<R> gso(const Basis<R>& basis) {
  Gso<R> out;
  std::array<Col<R>, 3> star = basis.b;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.mu[i][j] = lift<R>(i == j ? 1.0 : 0.0);
    for (int j = 0; j < i; ++j) {
      out.mu[i][j] = dot(basis.b[i], star[j]) / out.sq[j];
      for (int r = 0; r < 3; ++r) star[i][r] = star[i][r] - out.mu[i][j] * star[j][r];
    }
    out.sq[i] = dot(star[i], star[i]);
    const R norm = dot(basis.b[i], basis.b[i]);
    // Numerically dependent columns leave only rounding noise in b*_i.
    constexpr double noise = std::is_same_v<R, double> ? 1e-26 : 1e-140;
    if (!(out.sq[i] > lift<R>(0.0)) || to_d(out.sq[i]) <= to_d(norm) * noise) {
      throw PrecisionError("basis is numerically singular");
    }
  }
  return out;
}

template <class R>
struct Reduction {
  Basis<R> basis;
  IntMatrix3 transform = IntMatrix3::identity();
  long iterations = 0;
};

template <class R>
Reduction<R> lll(Basis<R> basis, double delta) {
  Reduction<R> out;
  const R d = lift<R>(delta);
  const R eta = lift<R>(kSizeReductionEta);
  int k = 1;
  Gso<R> g = gso(basis);
  while (k < 3) {
    if (++out.iterations > kLLLIterationCap) {
      throw PrecisionError("LLL did not converge within the iteration cap; basis is badly conditioned");
    }
    for (int j = k - 1; j >= 0; --j) {
      using std::abs;
      if (!(abs(g.mu[k][j]) > eta)) continue;
      const std::int64_t r = round_int(g.mu[k][j]);
      if (r == 0) continue;
      const R rr = lift<R>(static_cast<double>(r));
      for (int i = 0; i < 3; ++i) basis.b[k][i] = basis.b[k][i] - rr * basis.b[j][i];
      for (int i = 0; i < 3; ++i) out.transform(i, k) = checked_mul_add(out.transform(i, k), -r, out.transform(i, j));
      g = gso(basis);
    }
    const R m = g.mu[k][k - 1];
    if (g.sq[k] >= (d - m * m) * g.sq[k - 1]) {
      ++k;
    } else {
      std::swap(basis.b[k], basis.b[k - 1]);
      for (int i = 0; i < 3; ++i) std::swap(out.transform(i, k), out.transform(i, k - 1));
      g = gso(basis);
      k = std::max(k - 1, 1);
    }
  }
  out.basis = basis;
  return out;
}

template <class R>
R sup_of(const Col<R>& v) {
  using std::abs;
  R best = abs(v[0]);
  for (int i = 1; i < 3; ++i) {
    R x = abs(v[i]);
    if (best < x) best = x;
  }
  return best;
}

template <class R>
Col<R> combine(const Basis<R>& basis, const IVec& x) {
  Col<R> v{lift<R>(0.0), lift<R>(0.0), lift<R>(0.0)};
  for (int i = 0; i < 3; ++i) {
    if (x[i] == 0) continue;
    const R xi = lift<R>(static_cast<double>(x[i]));
    for (int r = 0; r < 3; ++r) v[r] = v[r] + xi * basis.b[i][r];
  }
  return v;
}

// Fincke-Pohst over {x : |sum x_i b_i|_2^2 <= radius_sq()}, visiting one of
// each pair +-x (the last nonzero coordinate positive). `leaf` may shrink the
// radius; it returns the new squared radius.
template <class R, class Leaf>
void enumerate(const Gso<R>& g, R radius_sq, Leaf&& leaf, std::uint64_t node_budget) {
  using std::sqrt;
  IVec x{0, 0, 0};
  std::uint64_t nodes = 0;
  // partial: squared length contributed by the levels above `level`.
  auto recurse = [&](auto&& self, int level, const R& partial, bool higher_zero) -> void {
    R center = lift<R>(0.0);
    for (int j = level + 1; j < 3; ++j) center = center - g.mu[j][level] * lift<R>(static_cast<double>(x[j]));
    const R room = radius_sq - partial;
    if (room < lift<R>(0.0)) return;
    const R half = sqrt(room / g.sq[level]);
    std::int64_t lo = ceil_int(center - half);
    const std::int64_t hi = floor_int(center + half);
    if (higher_zero) lo = std::max<std::int64_t>(lo, 0);
    for (std::int64_t xi = lo; xi <= hi; ++xi) {
      if (++nodes > node_budget) throw BudgetError("lattice enumeration exceeded its node budget");
      const R diff = lift<R>(static_cast<double>(xi)) - center;
      const R next = partial + diff * diff * g.sq[level];
      if (radius_sq < next) continue;
      x[level] = xi;
      if (level == 0) {
        if (!(higher_zero && xi == 0)) radius_sq = leaf(x);
      } else {
        self(self, level - 1, next, higher_zero && xi == 0);
      }
    }
    x[level] = 0;
  };
  recurse(recurse, 2, lift<R>(0.0), true);
}

IntegerVec3 to_ivec(const IntMatrix3& t, const IVec& x) {
  mpz_class c[3];
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) c[r] += mpz_class(static_cast<long>(t(r, k))) * static_cast<long>(x[k]);
  }
  return {c[0], c[1], c[2]};
}

template <class R>
Basis<R> effective_basis(const LatticeBasis3& lattice, const ExactMatrix& exact, const IntMatrix3& t);

template <>
Basis<double> effective_basis<double>(const LatticeBasis3& lattice, const ExactMatrix& exact, const IntMatrix3& t) {
  const ExactMatrix ut = exact_times(exact, t);
  Basis<double> out;
  for (int r = 0; r < 3; ++r) {
    const double scale = std::exp(lattice.row_log[static_cast<std::size_t>(r)]);
    for (int c = 0; c < 3; ++c) out.b[c][r] = BigFloat(ut(r, c), 53).to_double() * scale;
  }
  return out;
}

template <>
Basis<BigFloat> effective_basis<BigFloat>(const LatticeBasis3& lattice, const ExactMatrix& exact,
                                          const IntMatrix3& t) {
  const ExactMatrix ut = exact_times(exact, t);
  Basis<BigFloat> out;
  for (int r = 0; r < 3; ++r) {
    const BigFloat scale = exp(BigFloat(lattice.row_log[static_cast<std::size_t>(r)], kEscalationBits));
    for (int c = 0; c < 3; ++c) out.b[c][r] = BigFloat(ut(r, c), kEscalationBits) * scale;
  }
  return out;
}

Matrix3d to_matrix(const Basis<double>& b) {
  Matrix3d out;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) out(r, c) = b.b[c][r];
  return out;
}

Basis<double> from_matrix3d(const Matrix3d& m) {
  Basis<double> out;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) out.b[c][r] = m(r, c);
  return out;
}

template <class R>
double dynamic_range(const Gso<R>& g) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& s : g.sq) {
    const double v = std::sqrt(to_d(s));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi / lo;
}

struct Reduced {
  IntMatrix3 transform = IntMatrix3::identity();
  long iterations = 0;
  bool escalated = false;
};

// Double-precision reduction with exact refinement passes. Returns nullopt
// when the reduced basis is too skewed for double enumeration.
std::optional<Reduced> reduce_double(const LatticeBasis3& lattice, const ExactMatrix& exact, double delta) {
  Reduced out;
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    Reduction<double> red;
    try {
      red = lll(effective_basis<double>(lattice, exact, out.transform), delta);
    } catch (const PrecisionError&) {
      return std::nullopt;
    }
    out.iterations += red.iterations;
    if (red.transform == IntMatrix3::identity()) {
      if (dynamic_range(gso(red.basis)) > kDynamicRangeLimit) return std::nullopt;
      return out;
    }
    out.transform = int_mul(out.transform, red.transform);
  }
  return std::nullopt;
}

Reduced reduce_big(const LatticeBasis3& lattice, const ExactMatrix& exact, double delta) {
  Reduced out;
  out.escalated = true;
  for (int pass = 0; pass < kRefinePasses; ++pass) {
    Reduction<BigFloat> red = lll(effective_basis<BigFloat>(lattice, exact, out.transform), delta);
    out.iterations += red.iterations;
    if (red.transform == IntMatrix3::identity()) return out;
    out.transform = int_mul(out.transform, red.transform);
  }
  throw PrecisionError("LLL refinement did not settle even at 256 bits");
}

Reduced reduce(const LatticeBasis3& lattice, const ExactMatrix& exact, double delta) {
  if (auto r = reduce_double(lattice, exact, delta)) return *r;
  return reduce_big(lattice, exact, delta);
}

template <class R>
IVec shortest_coefficients(const Basis<R>& basis, std::uint64_t node_budget) {
  const Gso<R> g = gso(basis);
  IVec best_x{1, 0, 0};
  R best = sup_of(basis.b[0]);
  for (int i = 1; i < 3; ++i) {
    const R s = sup_of(basis.b[i]);
    if (s < best) {
      best = s;
      best_x = {0, 0, 0};
      best_x[static_cast<std::size_t>(i)] = 1;
    }
  }
  const R slack = lift<R>(3.0 * kRadiusSlack * kRadiusSlack);
  enumerate<R>(
      g, slack * best * best,
      [&](const IVec& x) {
        const R s = sup_of(combine(basis, x));
        if (s < best) {
          best = s;
          best_x = x;
        }
        return slack * best * best;
      },
      node_budget);
  return best_x;
}

}  // namespace

LatticeBasis3 LatticeBasis3::from_matrix(const Matrix3d& basis) {
  LatticeBasis3 out;
  out.unscaled = to_scalar(basis);
  out.eval_mode = ModeSpec::f64();
  return out;
}

LatticeBasis3 LatticeBasis3::from_matrix(const Matrix3& basis) {
  LatticeBasis3 out;
  out.unscaled = basis;
  ModeSpec mode = ModeSpec::f64();
  for (const auto& x : basis.m) {
    if (x.mode() == ScalarMode::bigfloat && (mode.kind != ScalarMode::bigfloat || x.bits() > mode.bits)) {
      mode = ModeSpec::bigfloat(x.bits());
    }
    if (x.is_rational() && mode.kind == ScalarMode::f64) mode = ModeSpec::bigfloat();
  }
  out.eval_mode = mode;
  return out;
}

LatticeBasis3 LatticeBasis3::orbit(const LineSegmentSpec& line, const Scalar& s, const FlowTime& t) {
  LatticeBasis3 out;
  const mpq_class sq = s.to_rational();
  out.unscaled = Matrix3::identity();
  out.unscaled(0, 1) = Scalar(sq);
  out.unscaled(0, 2) = Scalar(mpq_class(line.a_exact() * sq + line.b_exact()));
  const DiagonalFlow flow = g(t);
  out.row_log = flow.log_entries;
  out.eval_mode = line.eval_mode();
  return out;
}

Matrix3d LatticeBasis3::effective(const IntMatrix3& transform) const {
  return to_matrix(effective_basis<double>(*this, exact_of(unscaled), transform));
}

Vec3<Scalar> LatticeBasis3::vector(const IntegerVec3& c) const {
  Vec3<Scalar> out;
  const mpq_class coeff[3] = {mpq_class(c.p1), mpq_class(c.p2), mpq_class(c.q)};
  for (int r = 0; r < 3; ++r) {
    mpq_class acc = 0;
    for (int k = 0; k < 3; ++k) acc += unscaled(r, k).to_rational() * coeff[k];
    const double lg = row_log[static_cast<std::size_t>(r)];
    Scalar value = Scalar(acc).convert(eval_mode);
    if (lg != 0.0) value = value * exp_of(lg, eval_mode);
    out[static_cast<std::size_t>(r)] = value;
  }
  return out;
}

Scalar LatticeBasis3::sup_norm(const IntegerVec3& c) const {
  const Vec3<Scalar> v = vector(c);
  return max(abs(v[0]), max(abs(v[1]), abs(v[2])));
}

double LatticeBasis3::log_det() const {
  const mpq_class d = determinant(exact_of(unscaled));
  if (d == 0) throw InvalidInput("singular basis");
  return std::log(std::abs(d.get_d())) + row_log[0] + row_log[1] + row_log[2];
}

std::array<double, 3> GramSchmidt::lengths() const {
  return {std::sqrt(sq_norms[0]), std::sqrt(sq_norms[1]), std::sqrt(sq_norms[2])};
}

GramSchmidt gram_schmidt(const Matrix3d& basis) {
  const Gso<double> g = gso(from_matrix3d(basis));
  GramSchmidt out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.mu(i, j) = g.mu[i][j];
    out.sq_norms[static_cast<std::size_t>(i)] = g.sq[i];
  }
  return out;
}

LLLResult lll_reduce(const Matrix3d& basis, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) throw InvalidInput("LLL delta must lie in (1/4, 1)");
  return lll_reduce(LatticeBasis3::from_matrix(basis), delta);
}

LLLResult lll_reduce(const LatticeBasis3& basis, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) throw InvalidInput("LLL delta must lie in (1/4, 1)");
  const ExactMatrix exact = exact_of(basis.unscaled);
  const Reduced red = reduce(basis, exact, delta);
  return {to_matrix(effective_basis<double>(basis, exact, red.transform)), red.transform, red.iterations};
}

ShortVectorResult shortest_vector(const LatticeBasis3& basis, bool certify) {
  const ExactMatrix exact = exact_of(basis.unscaled);
  const Reduced red = reduce(basis, exact, kLLLDelta);
  IVec x{1, 0, 0};
  constexpr std::uint64_t kNodeBudget = 50'000'000;
  if (certify) {
    x = red.escalated ? shortest_coefficients(effective_basis<BigFloat>(basis, exact, red.transform), kNodeBudget)
                      : shortest_coefficients(effective_basis<double>(basis, exact, red.transform), kNodeBudget);
  } else {
    const Basis<double> b = effective_basis<double>(basis, exact, red.transform);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      const double s = sup_of(b.b[i]);
      if (s < best) {
        best = s;
        x = {0, 0, 0};
        x[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  ShortVectorResult out;
  out.vector = to_ivec(red.transform, x);
  out.lambda1 = basis.sup_norm(out.vector);
  out.certified = certify;
  out.escalated = red.escalated;
  return out;
}

ShortVectorResult shortest_vector(const Matrix3d& basis, bool certify) {
  return shortest_vector(LatticeBasis3::from_matrix(basis), certify);
}

std::uint64_t count_points(const LatticeBasis3& basis, double r, std::uint64_t budget) {
  if (!(r > 0.0)) throw InvalidInput("count radius must be positive");
  const ExactMatrix exact = exact_of(basis.unscaled);
  const Reduced red = reduce(basis, exact, kLLLDelta);
  const Basis<double> b = effective_basis<double>(basis, exact, red.transform);
  const Gso<double> g = gso(b);
  const double radius_sq = 3.0 * r * r * kRadiusSlack * kRadiusSlack;
  const Scalar exact_r(r);
  std::uint64_t half = 0;
  enumerate<double>(
      g, radius_sq,
      [&](const IVec& x) {
        const double s = sup_of(combine(b, x));
        bool inside = s <= r;
        if (std::abs(s - r) <= 1e-12 * r) inside = basis.sup_norm(to_ivec(red.transform, x)) <= exact_r;
        if (inside && ++half * 2 > budget) throw BudgetError("point count exceeds budget; use a smaller radius");
        return radius_sq;
      },
      budget * 20);
  return 2 * half;
}

std::uint64_t count_points(const Matrix3d& basis, double r, std::uint64_t budget) {
  return count_points(LatticeBasis3::from_matrix(basis), r, budget);
}

bool in_K_delta(const LatticeBasis3& basis, const Scalar& delta) {
  if (!(delta > Scalar(0) && delta < Scalar(1))) throw InvalidInput("delta must lie in (0, 1)");
  return shortest_vector(basis).lambda1 >= delta;
}

bool in_K_delta(const Matrix3d& basis, double delta) { return in_K_delta(LatticeBasis3::from_matrix(basis), delta); }

}  // namespace latflow
