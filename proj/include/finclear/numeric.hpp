#pragma once

// Scalar types and string conversions used across the library.
//
// Exact arithmetic runs on GMP rationals, numeric mode on MPFR floats with a
// runtime-selectable precision (FINCLEAR_PRECISION, significant decimal digits,
// default 50).

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

namespace finclear {

using Rational = boost::multiprecision::mpq_rational;
using Integer  = boost::multiprecision::mpz_int;
using Decimal  = boost::multiprecision::mpfr_float;

// Malformed user input: unparsable numbers, bad file syntax, unknown ids.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid input that violates a precondition of the requested
// operation (degenerate network, uncovered swap, missing central debtor, ...).
struct property_error : std::runtime_error {
  explicit property_error(const std::string& what) : std::runtime_error(what) {}
};

// Input exceeds a hard size limit of an exhaustive routine.
struct size_error : input_error {
  explicit size_error(const std::string& what) : input_error(what) {}
};

inline constexpr unsigned kDefaultDecimalDigits = 50;

// Applies FINCLEAR_PRECISION (or the default) to the MPFR scalar. Returns the
// digit count in effect. Safe to call repeatedly; later calls win, so tests can
// pin their own precision.
inline unsigned set_decimal_precision_from_env() {
  unsigned digits = kDefaultDecimalDigits;
  if (const char* env = std::getenv("FINCLEAR_PRECISION")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 100000)
      throw input_error("FINCLEAR_PRECISION must be a positive digit count, got '" +
                        std::string(env) + "'");
    digits = static_cast<unsigned>(v);
  }
  Decimal::default_precision(digits);
  return digits;
}

inline void ensure_decimal_precision() {
  static const unsigned once = set_decimal_precision_from_env();
  (void)once;
}

namespace detail {

inline bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

// Parses "p", "p/q", plain decimals ("0.25", "-3.5") and scientific notation
// ("2.5e-3"). Every finite decimal string maps to an exact rational.
inline Rational parse_rational(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw input_error("empty number");

  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = (s[0] == '-');
    pos = 1;
  }
  const std::string body = s.substr(pos);
  if (body.empty()) throw input_error("sign without digits in '" + text + "'");

  const auto slash = body.find('/');
  if (slash != std::string::npos) {
    const std::string num = body.substr(0, slash);
    const std::string den = body.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den))
      throw input_error("malformed rational '" + text + "'");
    Integer p(num), q(den);
    if (q == 0) throw input_error("zero denominator in '" + text + "'");
    Rational r(p, q);
    return negative ? Rational(-r) : r;
  }

  // Decimal / scientific form: digits [. digits] [e[sign]digits]
  std::string mantissa = body;
  long exponent = 0;
  const auto epos = body.find_first_of("eE");
  if (epos != std::string::npos) {
    mantissa = body.substr(0, epos);
    const std::string etext = body.substr(epos + 1);
    std::string edigits = etext;
    bool eneg = false;
    if (!edigits.empty() && (edigits[0] == '+' || edigits[0] == '-')) {
      eneg = (edigits[0] == '-');
      edigits = edigits.substr(1);
    }
    if (!detail::all_digits(edigits))
      throw input_error("malformed exponent in '" + text + "'");
    exponent = std::strtol(edigits.c_str(), nullptr, 10);
    if (eneg) exponent = -exponent;
  }

  std::string intpart = mantissa, fracpart;
  const auto dot = mantissa.find('.');
  if (dot != std::string::npos) {
    intpart = mantissa.substr(0, dot);
    fracpart = mantissa.substr(dot + 1);
  }
  if (intpart.empty() && fracpart.empty())
    throw input_error("no digits in '" + text + "'");
  if ((!intpart.empty() && !detail::all_digits(intpart)) ||
      (!fracpart.empty() && !detail::all_digits(fracpart)))
    throw input_error("malformed number '" + text + "'");

  Integer digits(intpart.empty() ? std::string("0") : intpart);
  for (char c : fracpart) {
    digits *= 10;
    digits += (c - '0');
  }
  Rational r(digits);
  long shift = exponent - static_cast<long>(fracpart.size());
  if (shift > 0)
    r *= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(shift)));
  else if (shift < 0)
    r /= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(-shift)));
  return negative ? Rational(-r) : r;
}

inline std::string format_rational(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << '/' << denominator(r);
  return out.str();
}

inline Decimal to_decimal(const Rational& r) { return Decimal(r); }

inline std::string format_decimal(const Decimal& d) {
  std::ostringstream out;
  out.precision(static_cast<std::streamsize>(Decimal::default_precision()));
  out << d;
  return out.str();
}

// Converts an MPFR value back to the exact rational it represents. Binary
// floats are dyadic, so this is lossless.
inline Rational decimal_to_rational(const Decimal& d) {
  if (d == 0) return Rational(0);
  mpfr_exp_t exp = 0;
  // Significand as an integer times 2^(exp - bits).
  const mpfr_srcptr raw = d.backend().data();
  const mpfr_prec_t prec = mpfr_get_prec(raw);
  boost::multiprecision::mpz_int mant;
  exp = mpfr_get_z_2exp(mant.backend().data(), raw);
  Rational r(mant);
  (void)prec;
  if (exp > 0) {
    r *= Rational(boost::multiprecision::pow(Integer(2), static_cast<unsigned>(exp)));
  } else if (exp < 0) {
    r /= Rational(boost::multiprecision::pow(Integer(2), static_cast<unsigned>(-exp)));
  }
  return r;
}

// Scalar adaptor so clearing code can run on either number type.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static Rational from_rational(const Rational& r) { return r; }
  static Rational to_rational(const Rational& s) { return s; }
  static std::string to_string(const Rational& s) { return format_rational(s); }
  static constexpr bool exact = true;
};

template <>
struct scalar_traits<Decimal> {
  static Decimal from_rational(const Rational& r) { return Decimal(r); }
  static Rational to_rational(const Decimal& s) { return decimal_to_rational(s); }
  static std::string to_string(const Decimal& s) { return format_decimal(s); }
  static constexpr bool exact = false;
};

template <class S>
S abs_value(const S& x) {
  return x < 0 ? S(-x) : x;
}

}  // namespace finclear
