#pragma once

// Fast residuals |q x + p| for exact x, with a rigorous error bound so that
// callers can fall back to exact arithmetic near a decision threshold.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>

#include "latflow/bigfloat.hpp"

namespace latflow::detail {

/// x ~ hi + lo with |x - hi - lo| <= |x| 2^-104.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
  double mag = 0.0;

  static DoubleDouble of(const mpq_class& x) {
    DoubleDouble out;
    out.hi = BigFloat(x, 53).to_double();
    out.lo = BigFloat(mpq_class(x - mpq_class(out.hi)), 53).to_double();
    out.mag = std::abs(out.hi);
    return out;
  }
};

/// q x = n + r with n an integer and |r| <= 1/2 up to `err`.
struct SplitProduct {
  double n = 0.0;
  double r = 0.0;
  double err = 0.0;
};

/// Valid for |q| < 2^52 and |q x| < 2^52.
inline SplitProduct split(const DoubleDouble& x, double q) {
  const double p = q * x.hi;
  const double e = std::fma(q, x.hi, -p);
  double n = std::nearbyint(p);
  double r = (p - n) + (e + q * x.lo);
  if (r > 0.5) {
    r -= 1.0;
    n += 1.0;
  } else if (r < -0.5) {
    r += 1.0;
    n -= 1.0;
  }
  const double err = std::abs(q) * (x.mag + 1.0) * 0x1p-100 + std::abs(r) * 0x1p-50 + 0x1p-1000;
  return {n, r, err};
}

/// Nearest integer to y, ties to even.
inline mpz_class nearest_integer(const mpq_class& y) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  const mpq_class frac = y - fl;
  const int c = cmp(frac, mpq_class(1, 2));
  if (c < 0) return fl;
  if (c > 0) return fl + 1;
  return mpz_odd_p(fl.get_mpz_t()) ? mpz_class(fl + 1) : fl;
}

/// p = nearest integer to -q x, residual = |q x + p|, exactly.
struct ExactResidual {
  mpz_class p;
  mpq_class residual;
};

inline ExactResidual exact_residual(const mpq_class& x, const mpz_class& q) {
  const mpq_class y = -(x * q);
  ExactResidual out;
  out.p = nearest_integer(y);
  out.residual = abs(mpq_class(out.p - y));
  return out;
}

}  // namespace latflow::detail
