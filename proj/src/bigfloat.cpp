#include "latflow/bigfloat.hpp"

#include <algorithm>
#include <vector>

#include "latflow/error.hpp"

namespace latflow {

namespace {

mpfr_prec_t wider(const BigFloat& x, const BigFloat& y) { return std::max(x.bits(), y.bits()); }

}  // namespace

BigFloat::BigFloat(mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(double x, mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, x, MPFR_RNDN);
}

BigFloat::BigFloat(const mpq_class& q, mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const mpz_class& z, mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
}

BigFloat BigFloat::from_decimal(std::string_view text, mpfr_prec_t bits) {
  BigFloat out(bits);
  std::string buf(text);
  char* end = nullptr;
  if (!buf.empty()) mpfr_strtofr(out.v_, buf.c_str(), &end, 10, MPFR_RNDN);
  if (buf.empty() || end != buf.c_str() + buf.size() || !out.is_finite()) {
    throw ParseError("malformed decimal: '" + buf + "'");
  }
  return out;
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, other.bits());
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, other.bits());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

mpq_class BigFloat::to_rational() const {
  if (!is_finite()) throw InvalidInput("non-finite big float has no rational value");
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), v_);
  return q;
}

mpz_class BigFloat::round_half_even() const {
  if (!is_finite()) throw InvalidInput("cannot round a non-finite big float");
  BigFloat r(bits());
  mpfr_rint(r.v_, v_, MPFR_RNDN);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), r.v_, MPFR_RNDN);
  return z;
}

mpz_class BigFloat::floor() const {
  if (!is_finite()) throw InvalidInput("cannot round a non-finite big float");
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
  return z;
}

std::string BigFloat::to_string(int digits) const {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  std::string fmt = "%." + std::to_string(digits) + "Rg";
  int n = mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), v_);
  if (n >= static_cast<int>(buf.size())) {
    buf.resize(static_cast<std::size_t>(n) + 1);
    mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), v_);
  }
  return std::string(buf.data());
}

BigFloat& BigFloat::operator+=(const BigFloat& o) { return *this = *this + o; }
BigFloat& BigFloat::operator-=(const BigFloat& o) { return *this = *this - o; }
BigFloat& BigFloat::operator*=(const BigFloat& o) { return *this = *this * o; }
BigFloat& BigFloat::operator/=(const BigFloat& o) { return *this = *this / o; }

BigFloat operator+(const BigFloat& x, const BigFloat& y) {
  BigFloat r(wider(x, y));
  mpfr_add(r.v_, x.v_, y.v_, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& x, const BigFloat& y) {
  BigFloat r(wider(x, y));
  mpfr_sub(r.v_, x.v_, y.v_, MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& x, const BigFloat& y) {
  BigFloat r(wider(x, y));
  mpfr_mul(r.v_, x.v_, y.v_, MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& x, const BigFloat& y) {
  if (y.is_zero()) throw InvalidInput("division by zero");
  BigFloat r(wider(x, y));
  mpfr_div(r.v_, x.v_, y.v_, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& x) {
  BigFloat r(x.bits());
  mpfr_neg(r.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat abs(const BigFloat& x) {
  BigFloat r(x.bits());
  mpfr_abs(r.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat sqrt(const BigFloat& x) {
  if (x.sign() < 0) throw InvalidInput("square root of a negative number");
  BigFloat r(x.bits());
  mpfr_sqrt(r.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat exp(const BigFloat& x) {
  BigFloat r(x.bits());
  mpfr_exp(r.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat log(const BigFloat& x) {
  if (x.sign() <= 0) throw InvalidInput("logarithm of a non-positive number");
  BigFloat r(x.bits());
  mpfr_log(r.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat pow(const BigFloat& x, const BigFloat& y) {
  BigFloat r(wider(x, y));
  mpfr_pow(r.v_, x.v_, y.v_, MPFR_RNDN);
  return r;
}

}  // namespace latflow
