#include "hmcdist/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "hmcdist/errors.hpp"

namespace hmcdist {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

Rat parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) {
      throw ValidationError("malformed number '" + std::string(original) + "'");
    }
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part))) {
    throw ValidationError("malformed number '" + std::string(original) + "'");
  }
  mpz_class digits(std::string(int_part) + std::string(frac_part), 10);
  exponent -= static_cast<long>(frac_part.size());
  Rat result(digits);
  if (exponent > 0) {
    result *= Rat(pow10(static_cast<unsigned long>(exponent)));
  } else if (exponent < 0) {
    result /= Rat(pow10(static_cast<unsigned long>(-exponent)));
  }
  result.canonicalize();
  return negative ? Rat(-result) : result;
}

}  // namespace

Rat parse_rational(std::string_view text) {
  if (text.empty()) throw ValidationError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) {
      num_digits.remove_prefix(1);
    }
    if (!all_digits(num_digits) || !all_digits(den)) {
      throw ValidationError("malformed fraction '" + std::string(text) + "'");
    }
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
    std::string n(num.front() == '+' ? num.substr(1) : num);
    Rat result(mpz_class(n, 10), d);
    result.canonicalize();
    return result;
  }
  return parse_decimal(text, text);
}

std::string to_string(const Rat& value) { return value.get_str(); }

double to_double(const Rat& value) { return value.get_d(); }

double log_rat(const Rat& value) {
  if (sgn(value) <= 0) return -HUGE_VAL;
  long num_exp = 0;
  long den_exp = 0;
  double num_mant = mpz_get_d_2exp(&num_exp, value.get_num_mpz_t());
  double den_mant = mpz_get_d_2exp(&den_exp, value.get_den_mpz_t());
  return std::log(num_mant) - std::log(den_mant) + static_cast<double>(num_exp - den_exp) * std::log(2.0);
}

Rat rat_from_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("non-finite value");
  return Rat(value);
}

}  // namespace hmcdist
