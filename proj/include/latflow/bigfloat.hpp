#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <string_view>

namespace latflow {

/// Binary floating point number with per-value precision, backed by MPFR.
///
/// Binary operations round to the larger of the two operand precisions, so a
/// chain of operations never loses bits relative to its widest input.
class BigFloat {
 public:
  static constexpr mpfr_prec_t kDefaultBits = 256;

  explicit BigFloat(mpfr_prec_t bits = kDefaultBits);
  BigFloat(double x, mpfr_prec_t bits);
  BigFloat(const mpq_class& q, mpfr_prec_t bits);
  BigFloat(const mpz_class& z, mpfr_prec_t bits);

  /// Correctly rounded conversion of a decimal literal.
  static BigFloat from_decimal(std::string_view text, mpfr_prec_t bits);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Exact value as a rational (every finite binary float is dyadic).
  mpq_class to_rational() const;
  /// Nearest integer, ties to even.
  mpz_class round_half_even() const;
  mpz_class floor() const;
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  std::string to_string(int digits = 20) const;

  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);
  BigFloat& operator*=(const BigFloat& o);
  BigFloat& operator/=(const BigFloat& o);

  friend BigFloat operator+(const BigFloat& x, const BigFloat& y);
  friend BigFloat operator-(const BigFloat& x, const BigFloat& y);
  friend BigFloat operator*(const BigFloat& x, const BigFloat& y);
  friend BigFloat operator/(const BigFloat& x, const BigFloat& y);
  friend BigFloat operator-(const BigFloat& x);

  friend int compare(const BigFloat& x, const BigFloat& y) { return mpfr_cmp(x.v_, y.v_); }
  friend int compare(const BigFloat& x, const mpq_class& y) { return mpfr_cmp_q(x.v_, y.get_mpq_t()); }
  friend bool operator==(const BigFloat& x, const BigFloat& y) { return compare(x, y) == 0; }
  friend bool operator<(const BigFloat& x, const BigFloat& y) { return compare(x, y) < 0; }
  friend bool operator<=(const BigFloat& x, const BigFloat& y) { return compare(x, y) <= 0; }
  friend bool operator>(const BigFloat& x, const BigFloat& y) { return compare(x, y) > 0; }
  friend bool operator>=(const BigFloat& x, const BigFloat& y) { return compare(x, y) >= 0; }

  friend BigFloat abs(const BigFloat& x);
  friend BigFloat sqrt(const BigFloat& x);
  friend BigFloat exp(const BigFloat& x);
  friend BigFloat log(const BigFloat& x);
  friend BigFloat pow(const BigFloat& x, const BigFloat& y);

 private:
  mpfr_t v_;
};

}  // namespace latflow
