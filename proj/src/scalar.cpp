#include "latflow/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "latflow/error.hpp"

namespace latflow {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double rational_to_double(const mpq_class& q) {
  // mpq_get_d truncates; go through MPFR for correct rounding.
  return BigFloat(q, 53).to_double();
}

// Result representation of a binary operation on x and y.
ModeSpec joint_mode(const Scalar& x, const Scalar& y) {
  const ScalarMode mx = x.mode();
  const ScalarMode my = y.mode();
  if (mx == ScalarMode::rational && my == ScalarMode::rational) return ModeSpec::rational();
  if (mx == ScalarMode::bigfloat || my == ScalarMode::bigfloat) {
    return ModeSpec::bigfloat(std::max(mx == ScalarMode::bigfloat ? x.bits() : 0U,
                                       my == ScalarMode::bigfloat ? y.bits() : 0U));
  }
  return ModeSpec::f64();
}

template <class OpD, class OpB, class OpQ>
Scalar binary(const Scalar& x, const Scalar& y, OpD od, OpB ob, OpQ oq) {
  const ModeSpec m = joint_mode(x, y);
  switch (m.kind) {
    case ScalarMode::f64:
      return Scalar(od(x.to_double(), y.to_double()));
    case ScalarMode::bigfloat:
      return Scalar(ob(x.to_bigfloat(m.bits), y.to_bigfloat(m.bits)));
    case ScalarMode::rational:
      return Scalar(mpq_class(oq(x.as_rational(), y.as_rational())));
  }
  throw std::logic_error("unreachable scalar mode");
}

bool is_decimal_char(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || c == '+' ||
         c == '-';
}

// Exact rational value of a finite decimal literal.
mpq_class parse_decimal_exact(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw ParseError("malformed number: '" + std::string(text) + "'");
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    const char* first = text.data() + i;
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed exponent in '" + std::string(text) + "'");
    i = text.size();
  }
  if (i != text.size()) throw ParseError("malformed number: '" + std::string(text) + "'");
  if (std::labs(exponent) > 100000) throw ParseError("exponent out of range in '" + std::string(text) + "'");
  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  const long scale = exponent - frac_digits;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  mpq_class out = scale >= 0 ? mpq_class(mantissa * ten_pow) : mpq_class(mantissa, ten_pow);
  out.canonicalize();
  return out;
}

mpq_class parse_rational_exact(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal_exact(text);
  const mpq_class num = parse_decimal_exact(text.substr(0, slash));
  const mpq_class den = parse_decimal_exact(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  mpq_class out = num / den;
  out.canonicalize();
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

unsigned parse_liouville_order(std::string_view rest, std::string_view whole) {
  unsigned k = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || k < 1 || k > 8) {
    throw ParseError("liouville:k needs 1 <= k <= 8, got '" + std::string(whole) + "'");
  }
  return k;
}

}  // namespace

ModeSpec ModeSpec::parse(std::string_view text) {
  if (text == "f64") return f64();
  if (text == "rational") return rational();
  if (text == "bigfloat") return bigfloat();
  constexpr std::string_view prefix = "bigfloat:";
  if (text.substr(0, prefix.size()) == prefix) {
    unsigned bits = 0;
    const std::string_view rest = text.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), bits);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || bits < 64 || bits > 65536) {
      throw ParseError("bigfloat precision must be 64..65536 bits: '" + std::string(text) + "'");
    }
    return bigfloat(bits);
  }
  throw ParseError("unknown scalar mode '" + std::string(text) + "'");
}

std::string ModeSpec::to_string() const {
  switch (kind) {
    case ScalarMode::f64:
      return "f64";
    case ScalarMode::bigfloat:
      return "bigfloat:" + std::to_string(bits);
    case ScalarMode::rational:
      return "rational";
  }
  return "?";
}

ModeSpec ModeSpec::float_mode() const {
  if (kind == ScalarMode::rational) return bigfloat(bits);
  return *this;
}

Scalar Scalar::ratio(long long num, long long den) {
  if (den == 0) throw InvalidInput("zero denominator");
  return Scalar(mpq_class(static_cast<long>(num), static_cast<long>(den)));
}

unsigned Scalar::bits() const {
  return std::visit(Overloaded{[](double) { return 53U; },
                               [](const BigFloat& b) { return static_cast<unsigned>(b.bits()); },
                               [](const mpq_class&) { return 0U; }},
                    v_);
}

ModeSpec Scalar::spec() const {
  switch (mode()) {
    case ScalarMode::f64:
      return ModeSpec::f64();
    case ScalarMode::bigfloat:
      return ModeSpec::bigfloat(bits());
    case ScalarMode::rational:
      return ModeSpec::rational();
  }
  return ModeSpec::rational();
}

Scalar Scalar::convert(const ModeSpec& target) const {
  switch (target.kind) {
    case ScalarMode::f64:
      return Scalar(to_double());
    case ScalarMode::bigfloat:
      if (mode() == ScalarMode::bigfloat) {
        BigFloat out(static_cast<mpfr_prec_t>(target.bits));
        mpfr_set(out.get(), as_bigfloat().get(), MPFR_RNDN);
        return Scalar(std::move(out));
      }
      return Scalar(to_bigfloat(target.bits));
    case ScalarMode::rational:
      return Scalar(to_rational());
  }
  throw std::logic_error("unreachable scalar mode");
}

double Scalar::to_double() const {
  return std::visit(Overloaded{[](double d) { return d; }, [](const BigFloat& b) { return b.to_double(); },
                               [](const mpq_class& q) { return rational_to_double(q); }},
                    v_);
}

mpq_class Scalar::to_rational() const {
  return std::visit(Overloaded{[](double d) {
                                 if (!std::isfinite(d)) throw InvalidInput("non-finite double has no rational value");
                                 return mpq_class(d);
                               },
                               [](const BigFloat& b) { return b.to_rational(); },
                               [](const mpq_class& q) { return q; }},
                    v_);
}

BigFloat Scalar::to_bigfloat(unsigned bits) const {
  return std::visit(Overloaded{[bits](double d) { return BigFloat(d, bits); },
                               [bits](const BigFloat& b) {
                                 // Widening only; a big float never loses bits here.
                                 BigFloat out(std::max<mpfr_prec_t>(bits, b.bits()));
                                 mpfr_set(out.get(), b.get(), MPFR_RNDN);
                                 return out;
                               },
                               [bits](const mpq_class& q) { return BigFloat(q, bits); }},
                    v_);
}

mpz_class Scalar::round_half_even() const {
  return std::visit(Overloaded{[](double d) { return BigFloat(d, 53).round_half_even(); },
                               [](const BigFloat& b) { return b.round_half_even(); },
                               [](const mpq_class& q) {
                                 // floor(q + 1/2), then fix exact ties to the even neighbour.
                                 mpq_class shifted = q + mpq_class(1, 2);
                                 mpz_class f;
                                 mpz_fdiv_q(f.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
                                 if (shifted == mpq_class(f) && mpz_odd_p(f.get_mpz_t())) f -= 1;
                                 return f;
                               }},
                    v_);
}

mpz_class Scalar::floor() const {
  return std::visit(Overloaded{[](double d) { return BigFloat(d, 53).floor(); },
                               [](const BigFloat& b) { return b.floor(); },
                               [](const mpq_class& q) {
                                 mpz_class f;
                                 mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
                                 return f;
                               }},
                    v_);
}

int Scalar::sign() const {
  return std::visit(Overloaded{[](double d) { return (d > 0) - (d < 0); }, [](const BigFloat& b) { return b.sign(); },
                               [](const mpq_class& q) { return sgn(q); }},
                    v_);
}

std::string Scalar::to_string(int digits) const {
  return std::visit(Overloaded{[digits](double d) {
                                 char buf[64];
                                 std::snprintf(buf, sizeof buf, "%.*g", digits, d);
                                 return std::string(buf);
                               },
                               [digits](const BigFloat& b) { return b.to_string(digits); },
                               [](const mpq_class& q) { return q.get_str(); }},
                    v_);
}

Scalar operator+(const Scalar& x, const Scalar& y) {
  return binary(
      x, y, [](double a, double b) { return a + b; }, [](const BigFloat& a, const BigFloat& b) { return a + b; },
      [](const mpq_class& a, const mpq_class& b) { return mpq_class(a + b); });
}

Scalar operator-(const Scalar& x, const Scalar& y) {
  return binary(
      x, y, [](double a, double b) { return a - b; }, [](const BigFloat& a, const BigFloat& b) { return a - b; },
      [](const mpq_class& a, const mpq_class& b) { return mpq_class(a - b); });
}

Scalar operator*(const Scalar& x, const Scalar& y) {
  return binary(
      x, y, [](double a, double b) { return a * b; }, [](const BigFloat& a, const BigFloat& b) { return a * b; },
      [](const mpq_class& a, const mpq_class& b) { return mpq_class(a * b); });
}

Scalar operator/(const Scalar& x, const Scalar& y) {
  if (y.is_zero()) throw InvalidInput("division by zero");
  return binary(
      x, y, [](double a, double b) { return a / b; }, [](const BigFloat& a, const BigFloat& b) { return a / b; },
      [](const mpq_class& a, const mpq_class& b) { return mpq_class(a / b); });
}

Scalar operator-(const Scalar& x) {
  return std::visit(Overloaded{[](double d) { return Scalar(-d); }, [](const BigFloat& b) { return Scalar(-b); },
                               [](const mpq_class& q) { return Scalar(mpq_class(-q)); }},
                    x.storage());
}

int compare(const Scalar& x, const Scalar& y) {
  const ScalarMode mx = x.mode();
  const ScalarMode my = y.mode();
  if (mx == ScalarMode::f64 && my == ScalarMode::f64) {
    const double a = x.to_double();
    const double b = y.to_double();
    return (a > b) - (a < b);
  }
  if (mx == ScalarMode::rational && my == ScalarMode::rational) return cmp(x.as_rational(), y.as_rational());
  if (mx != ScalarMode::rational && my != ScalarMode::rational) {
    const unsigned bits = std::max(x.bits(), y.bits());
    return compare(x.to_bigfloat(bits), y.to_bigfloat(bits));
  }
  // One rational, one float: compare exactly through MPFR.
  if (mx == ScalarMode::rational) {
    return -compare(y.to_bigfloat(y.bits()), x.as_rational());
  }
  return compare(x.to_bigfloat(x.bits()), y.as_rational());
}

Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }
Scalar min(const Scalar& x, const Scalar& y) { return y < x ? y : x; }
Scalar max(const Scalar& x, const Scalar& y) { return x < y ? y : x; }

namespace {

template <class FD, class FB>
Scalar transcendental(const Scalar& x, FD fd, FB fb) {
  if (x.mode() == ScalarMode::f64) return Scalar(fd(x.to_double()));
  const unsigned bits = x.mode() == ScalarMode::bigfloat ? x.bits() : 256U;
  return Scalar(fb(x.to_bigfloat(bits)));
}

}  // namespace

Scalar exp(const Scalar& x) {
  return transcendental(x, [](double d) { return std::exp(d); }, [](const BigFloat& b) { return exp(b); });
}

Scalar log(const Scalar& x) {
  if (x.sign() <= 0) throw InvalidInput("logarithm of a non-positive number");
  return transcendental(x, [](double d) { return std::log(d); }, [](const BigFloat& b) { return log(b); });
}

Scalar sqrt(const Scalar& x) {
  if (x.sign() < 0) throw InvalidInput("square root of a negative number");
  return transcendental(x, [](double d) { return std::sqrt(d); }, [](const BigFloat& b) { return sqrt(b); });
}

Scalar pow(const Scalar& x, const Scalar& y) {
  const ModeSpec m = joint_mode(x, y);
  if (m.kind == ScalarMode::f64) return Scalar(std::pow(x.to_double(), y.to_double()));
  const unsigned bits = m.kind == ScalarMode::bigfloat ? m.bits : 256U;
  return Scalar(pow(x.to_bigfloat(bits), y.to_bigfloat(bits)));
}

Scalar pow_int(const Scalar& x, unsigned n) {
  Scalar result = Scalar(1).convert(x.spec());
  Scalar base = x;
  while (n > 0) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n > 0) base *= base;
  }
  return result;
}

Scalar exp_of(double x, const ModeSpec& mode) {
  if (mode.kind == ScalarMode::f64) return Scalar(std::exp(x));
  return Scalar(exp(BigFloat(x, mode.float_mode().bits)));
}

mpq_class liouville_partial_sum(unsigned k) {
  mpq_class sum(0);
  unsigned long factorial = 1;
  for (unsigned j = 1; j <= k; ++j) {
    factorial *= j;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, factorial);
    sum += mpq_class(mpz_class(1), den);
  }
  sum.canonicalize();
  return sum;
}

Scalar scalar_from_decimal(std::string_view raw, const ModeSpec& mode) {
  const std::string text = trim(raw);
  if (text.empty()) throw ParseError("empty number");
  const bool has_slash = text.find('/') != std::string::npos;
  if (!has_slash && !std::all_of(text.begin(), text.end(), is_decimal_char)) {
    throw ParseError("malformed number: '" + text + "'");
  }
  switch (mode.kind) {
    case ScalarMode::rational:
      return Scalar(parse_rational_exact(text));
    case ScalarMode::bigfloat:
      if (has_slash) return Scalar(BigFloat(parse_rational_exact(text), mode.bits));
      parse_decimal_exact(text);  // validates the grammar
      return Scalar(BigFloat::from_decimal(text, mode.bits));
    case ScalarMode::f64: {
      if (has_slash) return Scalar(rational_to_double(parse_rational_exact(text)));
      parse_decimal_exact(text);
      double d = 0.0;
      const char* first = text.data();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), d);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(d)) {
        throw ParseError("number out of double range: '" + text + "'");
      }
      return Scalar(d);
    }
  }
  throw std::logic_error("unreachable scalar mode");
}

bool is_exact_literal(std::string_view raw) {
  const std::string text = trim(raw);
  if (text.rfind("liouville:", 0) == 0) return true;
  if (text == "sqrt2" || text == "sqrt3" || text == "golden") return false;
  try {
    parse_rational_exact(text);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

Scalar parse_scalar(std::string_view raw, const ModeSpec& mode) {
  const std::string text = trim(raw);
  auto irrational = [&](auto make) -> Scalar {
    if (mode.kind == ScalarMode::rational) {
      throw ParseError("'" + text + "' is irrational; use --mode bigfloat or f64");
    }
    return make(mode.kind == ScalarMode::f64 ? 53U : mode.bits).convert(mode);
  };
  if (text == "sqrt2") return irrational([](unsigned b) { return Scalar(sqrt(BigFloat(2.0, b + 16))); });
  if (text == "sqrt3") return irrational([](unsigned b) { return Scalar(sqrt(BigFloat(3.0, b + 16))); });
  if (text == "golden") {
    return irrational([](unsigned b) {
      const BigFloat one(1.0, b + 16);
      return Scalar((one + sqrt(BigFloat(5.0, b + 16))) / BigFloat(2.0, b + 16));
    });
  }
  constexpr std::string_view liouville = "liouville:";
  if (text.rfind(liouville, 0) == 0) {
    const unsigned k = parse_liouville_order(std::string_view(text).substr(liouville.size()), text);
    return Scalar(liouville_partial_sum(k)).convert(mode);
  }
  return scalar_from_decimal(text, mode);
}

}  // namespace latflow
