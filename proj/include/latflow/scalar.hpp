#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "latflow/bigfloat.hpp"

namespace latflow {

enum class ScalarMode { f64, bigfloat, rational };

/// Arithmetic policy for a computation: the scalar kind plus, for big floats,
/// the mantissa width in bits.
struct ModeSpec {
  ScalarMode kind = ScalarMode::rational;
  unsigned bits = 256;

  static ModeSpec f64() { return {ScalarMode::f64, 53}; }
  static ModeSpec bigfloat(unsigned bits = 256) { return {ScalarMode::bigfloat, bits}; }
  static ModeSpec rational() { return {ScalarMode::rational, 256}; }

  /// Accepts "f64", "rational", "bigfloat" and "bigfloat:<bits>".
  static ModeSpec parse(std::string_view text);
  std::string to_string() const;

  /// The float mode used when a value in this mode goes through a
  /// transcendental function (rational -> bigfloat at `bits`).
  ModeSpec float_mode() const;

  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

/// A real number in one of three representations: IEEE double, MPFR big float
/// with its own precision, or exact GMP rational.
///
/// Mixed arithmetic: float with float takes the wider precision; rational with
/// float takes the float's representation. Integers construct rationals.
class Scalar {
 public:
  using Storage = std::variant<double, BigFloat, mpq_class>;

  Scalar() : v_(mpq_class(0)) {}
  Scalar(double x) : v_(x) {}  // NOLINT(google-explicit-constructor)
  Scalar(BigFloat x) : v_(std::move(x)) {}  // NOLINT(google-explicit-constructor)
  Scalar(mpq_class x) : v_(std::move(x)) { std::get<mpq_class>(v_).canonicalize(); }  // NOLINT
  Scalar(const mpz_class& z) : v_(mpq_class(z)) {}  // NOLINT(google-explicit-constructor)
  Scalar(int x) : v_(mpq_class(x)) {}  // NOLINT(google-explicit-constructor)
  Scalar(long x) : v_(mpq_class(x)) {}  // NOLINT(google-explicit-constructor)
  Scalar(long long x) : v_(mpq_class(static_cast<long>(x))) {}  // NOLINT(google-explicit-constructor)
  Scalar(unsigned long x) : v_(mpq_class(x)) {}  // NOLINT(google-explicit-constructor)

  static Scalar ratio(long long num, long long den);

  ScalarMode mode() const { return static_cast<ScalarMode>(v_.index()); }
  /// Mantissa bits: 53 for doubles, the MPFR precision for big floats, 0 for rationals.
  unsigned bits() const;
  ModeSpec spec() const;

  bool is_rational() const { return mode() == ScalarMode::rational; }
  const Storage& storage() const { return v_; }
  const mpq_class& as_rational() const { return std::get<mpq_class>(v_); }
  const BigFloat& as_bigfloat() const { return std::get<BigFloat>(v_); }

  /// Value in `target` mode: rationals and doubles converted correctly rounded;
  /// converting to rational is exact.
  Scalar convert(const ModeSpec& target) const;

  double to_double() const;
  mpq_class to_rational() const;
  BigFloat to_bigfloat(unsigned bits) const;

  mpz_class round_half_even() const;
  mpz_class floor() const;
  int sign() const;
  bool is_zero() const { return sign() == 0; }

  /// Rationals print as "p/q" (or "p"); floats with `digits` significant digits.
  std::string to_string(int digits = 17) const;

  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  friend Scalar operator+(const Scalar& x, const Scalar& y);
  friend Scalar operator-(const Scalar& x, const Scalar& y);
  friend Scalar operator*(const Scalar& x, const Scalar& y);
  friend Scalar operator/(const Scalar& x, const Scalar& y);
  friend Scalar operator-(const Scalar& x);

  /// Exact comparison of the represented values, across modes.
  friend int compare(const Scalar& x, const Scalar& y);
  friend bool operator==(const Scalar& x, const Scalar& y) { return compare(x, y) == 0; }
  friend bool operator!=(const Scalar& x, const Scalar& y) { return compare(x, y) != 0; }
  friend bool operator<(const Scalar& x, const Scalar& y) { return compare(x, y) < 0; }
  friend bool operator<=(const Scalar& x, const Scalar& y) { return compare(x, y) <= 0; }
  friend bool operator>(const Scalar& x, const Scalar& y) { return compare(x, y) > 0; }
  friend bool operator>=(const Scalar& x, const Scalar& y) { return compare(x, y) >= 0; }

 private:
  Storage v_;
};

Scalar abs(const Scalar& x);
Scalar min(const Scalar& x, const Scalar& y);
Scalar max(const Scalar& x, const Scalar& y);
/// Transcendentals evaluate rationals as big floats at 256 bits.
Scalar exp(const Scalar& x);
Scalar log(const Scalar& x);
Scalar sqrt(const Scalar& x);
Scalar pow(const Scalar& x, const Scalar& y);
Scalar pow_int(const Scalar& x, unsigned n);
/// e^x in the float version of `mode` (rational maps to bigfloat).
Scalar exp_of(double x, const ModeSpec& mode);

/// Parses a finite decimal ("-1.25e-3") or a rational "p/q" into `mode`.
/// Exact in rational mode, correctly rounded otherwise.
Scalar scalar_from_decimal(std::string_view text, const ModeSpec& mode);

/// scalar_from_decimal plus the named constants sqrt2, sqrt3, golden and
/// liouville:k (the partial sum of 10^{-j!} for j = 1..k). Irrational names
/// are rejected in rational mode.
Scalar parse_scalar(std::string_view text, const ModeSpec& mode);

/// True when `text` denotes an exactly rational value (decimal, p/q, liouville:k).
bool is_exact_literal(std::string_view text);

/// The rational partial sum of 10^{-j!}, j = 1..k.
mpq_class liouville_partial_sum(unsigned k);

}  // namespace latflow
