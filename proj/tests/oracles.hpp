#pragma once

// Brute-force reference computations. They share no code with the library
// beyond the GMP types, so agreement is meaningful.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace oracle {

using Mat = std::array<std::array<double, 3>, 3>;  // m[row][col], columns are basis vectors

inline std::array<double, 3> column_combo(const Mat& m, long c0, long c1, long c2) {
  std::array<double, 3> v{};
  for (int r = 0; r < 3; ++r) {
    long double acc = static_cast<long double>(m[r][0]) * c0 + static_cast<long double>(m[r][1]) * c1 +
                      static_cast<long double>(m[r][2]) * c2;
    v[r] = static_cast<double>(acc);
  }
  return v;
}

inline double sup(const std::array<double, 3>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

/// min sup-norm over nonzero coefficient vectors in the box |c_i| <= k.
inline double lambda1_box(const Mat& m, long k) {
  double best = std::numeric_limits<double>::infinity();
  for (long a = -k; a <= k; ++a)
    for (long b = -k; b <= k; ++b)
      for (long c = -k; c <= k; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        best = std::min(best, sup(column_combo(m, a, b, c)));
      }
  return best;
}

inline long count_box(const Mat& m, double r, long k) {
  long n = 0;
  for (long a = -k; a <= k; ++a)
    for (long b = -k; b <= k; ++b)
      for (long c = -k; c <= k; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if (sup(column_combo(m, a, b, c)) <= r) ++n;
      }
  return n;
}

/// Exact nearest integer to x, ties to even.
inline mpz_class nearest(const mpq_class& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  const mpq_class frac = x - fl;
  if (frac < mpq_class(1, 2)) return fl;
  if (frac > mpq_class(1, 2)) return fl + 1;
  return (fl % 2 == 0) ? fl : mpz_class(fl + 1);
}

/// |q x - round(q x)| exactly.
inline mpq_class distance_to_z(const mpq_class& x, const mpz_class& q) {
  const mpq_class y = x * q;
  return abs(y - nearest(y));
}

/// sup over the endpoints of |e^{2t}(c0 + c1 s)|, e^{-t}|p2|, e^{-t}|q| in long double.
inline long double orbit_sup(const mpq_class& a, const mpq_class& b, const mpq_class& s1, const mpq_class& s2,
                             long double t, long p1, long p2, long q) {
  const mpq_class c0 = b * q + p1;
  const mpq_class c1 = a * q + p2;
  const mpq_class e1 = abs(mpq_class(c0 + c1 * s1));
  const mpq_class e2 = abs(mpq_class(c0 + c1 * s2));
  const long double first = std::exp(2 * t) * static_cast<long double>(std::max(e1, e2).get_d());
  const long double rest = std::exp(-t) * static_cast<long double>(std::max(std::labs(p2), std::labs(q)));
  return std::max(first, rest);
}

/// Liouville partial sum written out as a decimal string, parsed by GMP.
inline mpq_class liouville4() {
  mpq_class x("110001000000000000000001/1000000000000000000000000");
  x.canonicalize();
  return x;
}

}  // namespace oracle
